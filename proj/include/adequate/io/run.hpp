#pragma once

#include "json.hpp"
#include <string>

#include "adequate/io/config.hpp"

namespace adequate::io {

using Json = nlohmann::ordered_json;

Json config_to_json(const RunConfig& cfg);
// Inverse of config_to_json; throws UsageError on unknown values.
RunConfig config_from_json(const Json& j);

struct RunOutput {
  Json summary;     // {schema, command, config, results}
  std::string csv;  // empty when the command has no table
};

// Runs one command. Throws InputError for unreadable data and the module
// errors (DomainError, SolverError, ...) for analysis failures.
RunOutput run_command(const RunConfig& cfg);

// Writes the summary (to cfg.json_out, or returns it when that is empty) and
// the CSV (to cfg.csv_out when set). Throws ConfigurationError when a file
// cannot be written. Returns the summary text.
std::string emit_outputs(const RunOutput& out, const RunConfig& cfg);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace adequate::io
