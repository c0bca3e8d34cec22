#include "adequate/io/config.hpp"

#include <CLI11.hpp>

#include <fstream>

#include "adequate/io/datasets.hpp"
#include "adequate/io/run.hpp"

namespace adequate::io {

namespace {

const std::map<std::string, gauss::Direction> kDirections{{"at-least", gauss::Direction::AtLeast},
                                                          {"at-most", gauss::Direction::AtMost}};
const std::map<std::string, gauss::SweepMode> kSweepModes{
    {"shift", gauss::SweepMode::Shift}, {"set", gauss::SweepMode::Set}, {"drop", gauss::SweepMode::Drop}};

void add_common(CLI::App* sub, RunConfig& cfg, bool needs_data) {
  auto* data = sub->add_option("--data", cfg.data, "input file or dataset name (copper, normal:N, ...)");
  if (needs_data) data->required();
  sub->add_option("--seed", cfg.seed, "seed for every simulation")->capture_default_str();
  sub->add_option("--json", cfg.json_out, "write the JSON summary here instead of standard output");
}

void add_alpha(CLI::App* sub, RunConfig& cfg, const char* help = "content of the region") {
  sub->add_option("--alpha", cfg.alpha, help)->check(CLI::Range(0.0, 1.0))->capture_default_str();
}

void add_tables(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--t4-reps", cfg.t4_replications, "simulated Kuiper null size")->check(CLI::Range(1000, 100000000));
  sub->add_option("--calibration-reps", cfg.calibration_replications, "min-p null size")
      ->check(CLI::Range(1000, 100000000));
  sub->add_option("--region-p-reps", cfg.region_p_replications, "region p-value null size")
      ->check(CLI::Range(100, 100000000));
}

void add_grid(CLI::App* sub, RunConfig& cfg, const char* location, const char* scale) {
  sub->add_option("--mu-points", cfg.grid.mu_points, std::string("grid points along ") + location)
      ->check(CLI::Range(2, 100000));
  sub->add_option("--sigma-points", cfg.grid.sigma_points, std::string("grid points along ") + scale)
      ->check(CLI::Range(2, 100000));
  sub->add_option_function<std::vector<double>>(
         "--mu-range", [&cfg](const std::vector<double>& v) { cfg.grid.mu_low = v[0]; cfg.grid.mu_high = v[1]; },
         std::string(location) + " range LOW HIGH")
      ->expected(2)
      ->delimiter(',');
  sub->add_option_function<std::vector<double>>(
         "--sigma-range",
         [&cfg](const std::vector<double>& v) { cfg.grid.sigma_low = v[0]; cfg.grid.sigma_high = v[1]; },
         std::string(scale) + " range LOW HIGH")
      ->expected(2)
      ->delimiter(',');
}

void add_edits(CLI::App* sub, RunConfig& cfg) {
  sub->add_option_function<std::vector<std::string>>(
      "--replace",
      [&cfg](const std::vector<std::string>& items) {
        for (const auto& s : items) {
          const auto eq = s.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--replace", "expected OLD=NEW, got " + s);
          try {
            cfg.replace.push_back({std::stod(s.substr(0, eq)), std::stod(s.substr(eq + 1))});
          } catch (const std::exception&) {
            throw CLI::ValidationError("--replace", "expected OLD=NEW, got " + s);
          }
        }
      },
      "replace the observation equal to OLD by NEW (repeatable)");
  sub->add_option("--drop", cfg.drop, "remove the observation equal to VALUE (repeatable)");
}

void add_csv(CLI::App* sub, RunConfig& cfg, const char* what) {
  sub->add_option("--csv", cfg.csv_out, what);
}

void add_direction(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--direction", cfg.direction, "at-least (H0: >= bound) or at-most")
      ->transform(CLI::CheckedTransformer(kDirections, CLI::ignore_case));
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"gauss", "gauss-test", "m-region", "m-test", "poisson",
                                              "stepwise", "calibrate", "sweep", "validate"};
  return names;
}

RunConfig parse_cli(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Adequacy regions and noise-gated selection for small data sets", "adequate"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every command");

  auto* gauss = app.add_subcommand("gauss", "Gaussian approximation region");
  add_common(gauss, cfg, true);
  add_alpha(gauss, cfg);
  add_tables(gauss, cfg);
  add_grid(gauss, cfg, "mu", "sigma");
  add_edits(gauss, cfg);
  add_csv(gauss, cfg, "write member grid points here");
  gauss->add_option_function<std::vector<double>>(
           "--at", [&cfg](const std::vector<double>& v) { cfg.at = gauss::LocationScale{v[0], v[1]}; },
           "report the four p-values at MU,SIGMA")
      ->expected(2)
      ->delimiter(',');
  gauss->add_flag("--region-p", cfg.region_p, "region p-value and its null p-value");
  gauss->add_flag("--emptiness", cfg.emptiness, "smallest content with a nonempty region");
  gauss->add_flag("--subsample", cfg.subsample, "largest subsample size with a nonempty region");

  auto* gtest = app.add_subcommand("gauss-test", "test a bound on mu via regions, with the t-test beside it");
  add_common(gtest, cfg, true);
  add_tables(gtest, cfg);
  add_edits(gtest, cfg);
  gtest->add_option("--mu0", cfg.bound, "the bound")->required();
  add_direction(gtest, cfg);

  auto* mregion = app.add_subcommand("m-region", "M-functional approximation region");
  add_common(mregion, cfg, true);
  add_alpha(mregion, cfg);
  add_grid(mregion, cfg, "t_l", "t_s");
  add_edits(mregion, cfg);
  add_csv(mregion, cfg, "write member grid points here");
  mregion->add_option("--c", cfg.c, "psi scale")->check(CLI::PositiveNumber)->capture_default_str();

  auto* mtest = app.add_subcommand("m-test", "test a bound on the M location functional");
  add_common(mtest, cfg, true);
  add_edits(mtest, cfg);
  mtest->add_option("--bound", cfg.bound, "the bound")->required();
  add_direction(mtest, cfg);
  mtest->add_option("--c", cfg.c, "psi scale")->check(CLI::PositiveNumber)->capture_default_str();

  auto* pois = app.add_subcommand("poisson", "Poisson family and single-model adequacy");
  add_common(pois, cfg, true);
  add_csv(pois, cfg, "write the statistic profile here");
  pois->add_option("--level", cfg.level, "quantile of the simulated null")->check(CLI::Range(0.0, 1.0));
  pois->add_option("--k", cfg.k, "last explicit cell (default: overflow expected count >= 1)")
      ->check(CLI::PositiveNumber);
  pois->add_option("--replications", cfg.replications, "null samples per lambda")->check(CLI::Range(100, 100000000));
  pois->add_option("--lambda-points", cfg.lambda_points, "lambda grid size")->check(CLI::Range(2, 100000));
  pois->add_option_function<std::vector<double>>(
          "--lambda-range",
          [&cfg](const std::vector<double>& v) { cfg.lambda_low = v[0]; cfg.lambda_high = v[1]; },
          "lambda range LOW HIGH")
      ->expected(2)
      ->delimiter(',');

  auto* step = app.add_subcommand("stepwise", "noise-gated forward selection");
  add_common(step, cfg, true);
  step->add_option("--alpha", cfg.alpha, "stop at the first p-value above this (default 0.05)")
      ->check(CLI::Range(0.0, 1.0));
  step->add_option("--response", cfg.response, "response column: header name or 1-based number");
  step->add_flag("!--no-center", cfg.center, "do not center (no intercept)");

  auto* calib = app.add_subcommand("calibrate", "per-feature level for a region content");
  add_common(calib, cfg, false);
  add_alpha(calib, cfg);
  add_tables(calib, cfg);
  calib->add_option("--n", cfg.n, "sample size (default: size of --data)")->check(CLI::Range(5, 100000));
  calib->add_flag("--fixed-point", cfg.fixed_point, "iterate until the simulated content is within 0.005");

  auto* sweep = app.add_subcommand("sweep", "move one observation and follow the region");
  add_common(sweep, cfg, true);
  add_alpha(sweep, cfg);
  add_tables(sweep, cfg);
  add_grid(sweep, cfg, "mu", "sigma");
  add_edits(sweep, cfg);
  add_csv(sweep, cfg, "write one row per sweep value here");
  sweep->add_option("--mode", cfg.sweep_mode, "shift, set or drop")
      ->transform(CLI::CheckedTransformer(kSweepModes, CLI::ignore_case));
  sweep->add_option("--index", cfg.sweep_index, "0-based observation index");
  sweep->add_option("--step", cfg.sweep_step, "increment between sweep values");
  sweep->add_option("--count", cfg.sweep_count, "number of sweep values")->check(CLI::Range(1, 100000));
  sweep->add_option("--value", cfg.sweep_value, "first value in set mode");

  auto* validate = app.add_subcommand("validate", "Monte Carlo checks of the beta law and the M-functional CLT");
  add_common(validate, cfg, false);
  add_alpha(validate, cfg);
  validate->add_option("--target", cfg.target, "beta-law or clt")->check(CLI::IsMember({"beta-law", "clt"}));
  validate->add_option("--n", cfg.n, "sample size (default 20 for beta-law, 27 for clt)")->check(CLI::Range(3, 100000));
  validate->add_option("--p0", cfg.p0, "covariates already included (beta-law)");
  validate->add_option("--replications", cfg.replications, "simulated values")->check(CLI::Range(100, 100000000));
  validate->add_option("--c", cfg.c, "psi scale (clt)")->check(CLI::PositiveNumber);

  std::string replay_file;
  auto* replay = app.add_subcommand("replay", "rerun the config block of an emitted summary");
  replay->add_option("summary", replay_file, "JSON summary written by an earlier run")->required();
  replay->add_option("--json", cfg.json_out, "write the JSON summary here instead of standard output");
  replay->add_option("--csv", cfg.csv_out, "write the CSV table here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError(app.help("", CLI::AppFormatMode::All), 0);
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    throw UsageError(std::string(e.what()) + "\n" + (subs.empty() ? app.help() : subs.front()->help()));
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "replay") {
    std::ifstream in(replay_file);
    if (!in) throw UsageError("cannot open " + replay_file);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      throw UsageError(replay_file + ": " + e.what());
    }
    if (!doc.contains("config") || doc.value("schema", "") != kSchema) {
      throw UsageError(replay_file + ": not an " + std::string(kSchema) + " summary");
    }
    RunConfig replayed = config_from_json(doc.at("config"));
    replayed.json_out = cfg.json_out;
    replayed.csv_out = cfg.csv_out;
    return replayed;
  }
  if (cfg.command == "stepwise" && step->count("--alpha") == 0) cfg.alpha = 0.05;
  if (cfg.command == "stepwise" && cfg.response.empty() && !is_dataset_name(cfg.data)) {
    throw UsageError("stepwise: --response is required for a data file");
  }
  if (cfg.command == "calibrate" && !cfg.n && cfg.data.empty()) {
    throw UsageError("calibrate: give --n or --data");
  }
  return cfg;
}

RunConfig parse_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_cli(args);
}

}  // namespace adequate::io
