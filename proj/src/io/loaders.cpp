#include "adequate/io/loaders.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "adequate/errors.hpp"

namespace adequate::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// Comma-separated when the line has a comma (fields trimmed, empty fields
// kept so they fail to parse), whitespace-separated otherwise.
std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  if (line.find(',') != std::string::npos) {
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(',', start);
      out.push_back(trim(line.substr(start, pos - start)));
      if (pos == std::string::npos) return out;
      start = pos + 1;
    }
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Calls visit(fields, line_number) for each line that is not blank or a
// comment.
template <typename Visit>
void for_each_record(std::istream& in, Visit&& visit) {
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    visit(fields_of(line.substr(start)), number);
  }
}

bool parse_double(const std::string& s, double& v) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc{} && ptr == last;
}

std::ifstream open(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file.string());
  return in;
}

}  // namespace

Table read_table(std::istream& in) {
  Table t;
  bool first = true;
  std::size_t width = 0;
  for_each_record(in, [&](const std::vector<std::string>& fields, long number) {
    std::vector<double> row;
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        if (first) {
          t.header = fields;
          width = fields.size();
          first = false;
          return;
        }
        throw InputError("not a number: '" + f + "'", number);
      }
      if (!std::isfinite(v)) throw InputError("non-finite value", number);
      row.push_back(v);
    }
    first = false;
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw InputError("expected " + std::to_string(width) + " fields, found " + std::to_string(row.size()), number);
    }
    t.rows.push_back(std::move(row));
  });
  if (t.rows.empty()) throw InputError("no data rows");
  return t;
}

Table read_table(const std::filesystem::path& file) {
  auto in = open(file);
  return read_table(in);
}

std::vector<double> parse_values(std::istream& in) {
  const Table t = read_table(in);
  std::vector<double> out;
  if (t.rows.size() == 1) return t.rows.front();
  if (t.rows.front().size() != 1) throw InputError("expected one value per line");
  for (const auto& r : t.rows) out.push_back(r.front());
  return out;
}

std::vector<double> load_values(const std::filesystem::path& file) {
  auto in = open(file);
  return parse_values(in);
}

std::vector<long> parse_counts(std::istream& in) {
  std::vector<long> out;
  bool first = true;
  for_each_record(in, [&](const std::vector<std::string>& fields, long number) {
    std::vector<long> row;
    for (const auto& f : fields) {
      long v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        double d = 0.0;
        if (first && !parse_double(f, d)) {
          first = false;
          return;  // header row
        }
        throw InputError("not a nonnegative integer: '" + f + "'", number);
      }
      if (v < 0) throw InputError("negative count", number);
      row.push_back(v);
    }
    first = false;
    out.insert(out.end(), row.begin(), row.end());
  });
  if (out.empty()) throw InputError("no counts");
  return out;
}

std::vector<long> load_counts(const std::filesystem::path& file) {
  auto in = open(file);
  return parse_counts(in);
}

stepwise::RegressionData parse_regression(std::istream& in, const std::string& response) {
  const Table t = read_table(in);
  const std::size_t width = t.rows.front().size();
  std::size_t col = width;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j] == response) col = j;
  }
  if (col == width) {
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(response.data(), response.data() + response.size(), k);
    if (ec == std::errc{} && ptr == response.data() + response.size() && k >= 1 && k <= width) col = k - 1;
  }
  if (col == width) throw InputError("response column '" + response + "' not found");
  std::vector<double> y;
  std::vector<std::vector<double>> cols(width - 1);
  std::vector<std::string> labels;
  for (std::size_t j = 0, c = 0; j < width; ++j) {
    if (j == col) continue;
    labels.push_back(t.header.empty() ? "x" + std::to_string(c + 1) : t.header[j]);
    ++c;
  }
  for (const auto& r : t.rows) {
    y.push_back(r[col]);
    for (std::size_t j = 0, c = 0; j < width; ++j) {
      if (j != col) cols[c++].push_back(r[j]);
    }
  }
  try {
    return stepwise::RegressionData(std::move(y), std::move(cols), std::move(labels));
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

stepwise::RegressionData load_regression(const std::filesystem::path& file, const std::string& response) {
  auto in = open(file);
  return parse_regression(in, response);
}

}  // namespace adequate::io
