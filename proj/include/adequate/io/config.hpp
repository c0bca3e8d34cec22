#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adequate/gauss/diagnostics.hpp"
#include "adequate/numerics/simulation.hpp"

namespace adequate::io {

inline constexpr const char* kSchema = "adequate/1";

// Bad command line. exit_code is 2, or 0 for --help (message holds the help
// text then).
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& what, int exit_code = 2) : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

struct Replacement {
  double from;
  double to;
};

// Everything a run depends on. Output paths are not part of the echoed
// config, so replaying a summary cannot overwrite it.
struct RunConfig {
  std::string command;
  std::string data;  // file path or dataset name (see datasets.hpp)
  double alpha = 0.9;
  std::uint64_t seed = numerics::kDefaultSeed;

  std::size_t t4_replications = 100000;
  std::size_t calibration_replications = 10000;
  std::size_t region_p_replications = 10000;
  std::size_t replications = 2000;  // poisson nulls and validators

  gauss::GridConfig grid;
  std::vector<Replacement> replace;
  std::vector<double> drop;

  // gauss
  std::optional<gauss::LocationScale> at;
  bool region_p = false;
  bool emptiness = false;
  bool subsample = false;
  // gauss-test and m-test
  double bound = 0.0;
  gauss::Direction direction = gauss::Direction::AtLeast;
  // m-region and m-test
  double c = 0.2;
  // poisson
  double level = 0.95;
  std::optional<int> k;
  std::size_t lambda_points = 201;
  std::optional<double> lambda_low;
  std::optional<double> lambda_high;
  // stepwise
  std::string response;
  bool center = true;
  // calibrate and validate
  std::optional<std::size_t> n;
  bool fixed_point = false;
  std::string target = "beta-law";
  std::size_t p0 = 3;
  // sweep
  gauss::SweepMode sweep_mode = gauss::SweepMode::Shift;
  std::size_t sweep_index = 0;
  double sweep_step = 0.0;
  std::size_t sweep_count = 1;
  double sweep_value = 0.0;

  std::string json_out;  // empty: standard output
  std::string csv_out;
};

// Throws UsageError. args excludes the program name.
RunConfig parse_cli(const std::vector<std::string>& args);
RunConfig parse_cli(int argc, const char* const* argv);

const std::vector<std::string>& command_names();

}  // namespace adequate::io
