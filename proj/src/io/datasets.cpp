#include "adequate/io/datasets.hpp"

#include <charconv>

#include "adequate/errors.hpp"
#include "adequate/numerics/random.hpp"

namespace adequate::io {

namespace {

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(':', start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

double number(std::string_view field, std::string_view name) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw InputError("bad number '" + std::string(field) + "' in dataset name " + std::string(name));
  }
  return v;
}

std::size_t count(std::string_view field, std::string_view name) {
  const double v = number(field, name);
  if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw InputError("bad size '" + std::string(field) + "' in dataset name " + std::string(name));
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t stream(const char* label) { return numerics::stream_id(label); }

}  // namespace

const std::vector<std::string>& copper_text() {
  static const std::vector<std::string> text = {
      "2.16", "2.21", "2.15", "2.05", "2.06", "2.04", "1.90", "2.03", "2.06",
      "2.02", "2.06", "1.92", "2.08", "2.05", "1.88", "1.99", "2.01", "1.86",
      "1.70", "1.88", "1.99", "1.93", "2.20", "2.02", "1.92", "2.13", "2.13"};
  return text;
}

std::vector<double> copper_values() {
  std::vector<double> out;
  for (const auto& t : copper_text()) out.push_back(std::stod(t));
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t copper_checksum() {
  std::string joined;
  for (const auto& t : copper_text()) {
    if (!joined.empty()) joined += ',';
    joined += t;
  }
  return fnv1a64(joined);
}

bool is_dataset_name(std::string_view name) {
  const auto kind = split_colon(name).front();
  return name == "copper" ||
         (name.find(':') != std::string_view::npos && (kind == "normal" || kind == "poisson" || kind == "planted"));
}

gauss::Sample named_sample(std::string_view name, std::uint64_t seed) {
  if (name == "copper") return gauss::Sample(copper_values());
  const auto parts = split_colon(name);
  if (parts[0] == "normal" && (parts.size() == 2 || parts.size() == 4)) {
    const std::size_t n = count(parts[1], name);
    const double mu = parts.size() == 4 ? number(parts[2], name) : 0.0;
    const double sigma = parts.size() == 4 ? number(parts[3], name) : 1.0;
    if (!(sigma > 0.0)) throw InputError("normal dataset needs sigma > 0");
    numerics::CounterRng rng(seed, stream("data/normal"), 0);
    std::vector<double> x(n);
    for (double& v : x) v = mu + sigma * rng.normal();
    return gauss::Sample(std::move(x));
  }
  throw InputError("unknown sample dataset '" + std::string(name) + "'");
}

std::vector<long> named_counts(std::string_view name, std::uint64_t seed) {
  const auto parts = split_colon(name);
  if (parts[0] == "poisson" && parts.size() == 3) {
    const std::size_t n = count(parts[1], name);
    const double lambda = number(parts[2], name);
    if (!(lambda > 0.0)) throw InputError("poisson dataset needs lambda > 0");
    numerics::CounterRng rng(seed, stream("data/poisson"), 0);
    std::vector<long> out(n);
    for (auto& c : out) c = poisson::draw_poisson(rng, lambda);
    return out;
  }
  throw InputError("unknown count dataset '" + std::string(name) + "'");
}

stepwise::RegressionData named_regression(std::string_view name, std::uint64_t seed) {
  const auto parts = split_colon(name);
  if (parts[0] == "planted" && parts.size() == 3) {
    const std::size_t n = count(parts[1], name), p = count(parts[2], name);
    if (p < 8) throw InputError("planted dataset needs p >= 8");
    numerics::CounterRng rng(seed, stream("data/planted"), 0);
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    for (auto& c : cols) {
      for (double& v : c) v = rng.normal();
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = cols[2][i] + 0.5 * cols[6][i] + 0.1 * rng.normal();
    return stepwise::RegressionData(std::move(y), std::move(cols));
  }
  throw InputError("unknown regression dataset '" + std::string(name) + "'");
}

}  // namespace adequate::io
