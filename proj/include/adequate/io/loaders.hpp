#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "adequate/stepwise/stepwise.hpp"

namespace adequate::io {

// Input files are plain text. Blank lines and lines starting with '#' are
// ignored; fields are separated by commas and/or whitespace. A first row
// with any non-numeric field is a header. Errors are InputError with the
// 1-based line number.

struct Table {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in);
Table read_table(const std::filesystem::path& file);

// All values of a one-column file (a single row of values is accepted too).
std::vector<double> load_values(const std::filesystem::path& file);
std::vector<double> parse_values(std::istream& in);

// Nonnegative integer counts.
std::vector<long> load_counts(const std::filesystem::path& file);
std::vector<long> parse_counts(std::istream& in);

// `response` is a header name or a 1-based column number. The other columns
// are covariates, labelled by the header (or x1, x2, ... in file order).
stepwise::RegressionData load_regression(const std::filesystem::path& file, const std::string& response);
stepwise::RegressionData parse_regression(std::istream& in, const std::string& response);

}  // namespace adequate::io
