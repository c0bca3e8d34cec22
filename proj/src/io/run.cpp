#include "adequate/io/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "adequate/errors.hpp"
#include "adequate/io/datasets.hpp"
#include "adequate/io/loaders.hpp"
#include "adequate/mfunc/mfunctional.hpp"
#include "adequate/poisson/adequacy.hpp"
#include "adequate/stepwise/stepwise.hpp"

namespace adequate::io {

namespace {

const char* direction_name(gauss::Direction d) { return d == gauss::Direction::AtLeast ? "at-least" : "at-most"; }

const char* sweep_name(gauss::SweepMode m) {
  switch (m) {
    case gauss::SweepMode::Shift: return "shift";
    case gauss::SweepMode::Set: return "set";
    case gauss::SweepMode::Drop: return "drop";
  }
  return "shift";
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

// nlohmann writes non-finite doubles as null; keep that explicit.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json interval_json(const std::optional<gauss::Interval>& i) {
  if (!i) return nullptr;
  return Json{{"low", i->low}, {"high", i->high}};
}

Json axis_json(const gauss::Axis& a) {
  return Json{{"low", a.low}, {"high", a.high()}, {"step", a.step}, {"points", a.points}};
}

gauss::GaussConfig gauss_config(const RunConfig& cfg) {
  gauss::GaussConfig g;
  g.t4_replications = cfg.t4_replications;
  g.calibration_replications = cfg.calibration_replications;
  g.region_p_replications = cfg.region_p_replications;
  g.seed = cfg.seed;
  if (const char* dir = std::getenv("ADEQUATE_CACHE_DIR"); dir && *dir) g.cache_dir = dir;
  return g;
}

gauss::Sample load_sample(const RunConfig& cfg) {
  gauss::Sample x = is_dataset_name(cfg.data) ? named_sample(cfg.data, cfg.seed) : gauss::Sample(load_values(cfg.data));
  auto find = [&](double v) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::fabs(x[i] - v) <= 1e-9 * std::max(1.0, std::fabs(v))) return i;
    }
    throw InputError("no observation equals " + format_number(v));
  };
  for (const auto& r : cfg.replace) x = x.with_value(find(r.from), r.to);
  for (double v : cfg.drop) x = x.without(find(v));
  return x;
}

Json sample_json(const gauss::Sample& x) {
  return Json{{"n", x.size()}, {"mean", x.mean()}, {"sd", x.sd()}};
}

std::string csv_row(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ',';
    out += format_number(v);
  }
  return out + '\n';
}

RunOutput run_gauss(const RunConfig& cfg) {
  const auto x = load_sample(cfg);
  const gauss::NullTables tables(gauss_config(cfg));
  const auto cal = gauss::calibrate(x.size(), cfg.alpha, tables);
  const auto region = gauss::region_scan(x, cfg.alpha, cfg.grid, tables);
  const auto t = gauss::t_confidence_interval(x, cfg.alpha);
  Json r;
  r["sample"] = sample_json(x);
  r["calibration"] = {{"alpha", cal.alpha},
                      {"alpha_start", cal.alpha_start},
                      {"alpha_star", cal.alpha_star},
                      {"alpha_tilde", cal.alpha_tilde},
                      {"alpha_effective", cal.alpha_effective}};
  r["grid"] = {{"mu", axis_json(region.axes.mu)}, {"sigma", axis_json(region.axes.sigma)}};
  std::optional<gauss::Interval> sigma_range;
  for (const auto& p : region.points) {
    if (!sigma_range) sigma_range = gauss::Interval{p.theta.sigma, p.theta.sigma};
    sigma_range->low = std::min(sigma_range->low, p.theta.sigma);
    sigma_range->high = std::max(sigma_range->high, p.theta.sigma);
  }
  r["region"] = {{"points", region.count()},
                 {"mu_projection", interval_json(gauss::mu_projection(region))},
                 {"sigma_range", interval_json(sigma_range)},
                 {"grid_max_p_min", region.grid_max_p_min},
                 {"grid_argmax", {{"mu", region.grid_argmax.mu}, {"sigma", region.grid_argmax.sigma}}}};
  r["t_interval"] = {{"low", t.interval.low}, {"high", t.interval.high}, {"degenerate", t.degenerate}};
  if (cfg.at) {
    const auto m = gauss::member_pvalues(x, *cfg.at, tables.t4_table(x.size()), cal.alpha_tilde);
    r["at"] = {{"mu", cfg.at->mu}, {"sigma", cfg.at->sigma}, {"p1", m.p1}, {"p2", m.p2},
               {"p3", m.p3},       {"p4", m.p4},             {"p_min", m.p_min}, {"member", m.member}};
  }
  if (cfg.region_p) {
    const auto rp = gauss::region_p_value(x, tables);
    r["region_p"] = {{"region_p", rp.region_p}, {"p_of_p", rp.p_of_p},
                     {"argmax", {{"mu", rp.argmax.mu}, {"sigma", rp.argmax.sigma}}}};
  }
  if (cfg.emptiness) {
    const auto e = gauss::min_alpha_nonempty(x, tables, cfg.grid);
    r["emptiness"] = {{"p_star", e.p_star}, {"alpha_star", e.alpha_star}, {"below_floor", e.below_floor}};
  }
  if (cfg.subsample) {
    gauss::SubsampleSpec spec;
    spec.seed = cfg.seed;
    r["subsample"] = {{"fit_size", gauss::subsample_fit_size(x, cfg.alpha, tables, spec)},
                      {"subsamples", spec.subsamples}};
  }
  std::string csv = "mu,sigma,p1,p2,p3,p4,p_min\n";
  for (const auto& p : region.points) {
    csv += csv_row({p.theta.mu, p.theta.sigma, p.p.p1, p.p.p2, p.p.p3, p.p.p4, p.p.p_min});
  }
  return {Json{{"results", r}}, csv};
}

RunOutput run_gauss_test(const RunConfig& cfg) {
  const auto x = load_sample(cfg);
  const gauss::NullTables tables(gauss_config(cfg));
  const auto b = gauss::test_mu_bound(x, cfg.bound, cfg.direction, tables);
  Json r;
  r["sample"] = sample_json(x);
  r["hypothesis"] = {{"parameter", "mu"}, {"bound", cfg.bound}, {"direction", direction_name(cfg.direction)}};
  r["region_test"] = {{"p_star", b.p_star},
                      {"alpha_star", b.alpha_star},
                      {"p_min", b.p_min},
                      {"theta", {{"mu", b.theta.mu}, {"sigma", b.theta.sigma}}},
                      {"below_floor", b.below_floor}};
  r["t_test"] = {{"p_value", gauss::t_test_pvalue(x, cfg.bound, cfg.direction)}};
  return {Json{{"results", r}}, {}};
}

RunOutput run_m_region(const RunConfig& cfg) {
  const auto x = load_sample(cfg);
  mfunc::MConfig m;
  m.c = cfg.c;
  const auto est = mfunc::solve_m(x, m);
  const auto region = mfunc::m_region(x, cfg.alpha, m, cfg.grid);
  Json r;
  r["sample"] = sample_json(x);
  r["estimate"] = {{"t_l", est.t_l}, {"t_s", est.t_s}, {"iterations", est.iterations}};
  r["grid"] = {{"t_l", axis_json(region.axes.mu)}, {"t_s", axis_json(region.axes.sigma)}};
  r["region"] = {{"alpha_tilde", region.alpha_tilde},
                 {"quantile", region.quantile},
                 {"points", region.count()},
                 {"t_l_projection", interval_json(mfunc::t_l_projection(region))}};
  std::string csv = "t_l,t_s,psi_stat,chi_stat\n";
  for (const auto& p : region.points) csv += csv_row({p.t_l, p.t_s, p.psi_stat, p.chi_stat});
  return {Json{{"results", r}}, csv};
}

RunOutput run_m_test(const RunConfig& cfg) {
  const auto x = load_sample(cfg);
  mfunc::MConfig m;
  m.c = cfg.c;
  const auto t = mfunc::test_tl_bound(x, cfg.bound, m, cfg.direction);
  Json r;
  r["sample"] = sample_json(x);
  r["hypothesis"] = {{"parameter", "t_l"}, {"bound", cfg.bound}, {"direction", direction_name(cfg.direction)}};
  r["region_test"] = {{"p_star", t.p_star}, {"z_min", t.z_min}, {"t_s", t.t_s}};
  return {Json{{"results", r}}, {}};
}

RunOutput run_poisson(const RunConfig& cfg) {
  const auto counts = is_dataset_name(cfg.data) ? named_counts(cfg.data, cfg.seed) : load_counts(cfg.data);
  const poisson::CountSample s(counts, cfg.k);
  std::vector<double> grid = poisson::default_lambda_grid(s, cfg.lambda_points);
  if (cfg.lambda_low || cfg.lambda_high) {
    const double lo = cfg.lambda_low.value_or(grid.front()), hi = cfg.lambda_high.value_or(grid.back());
    if (!(lo > 0.0 && hi > lo)) throw ConfigurationError("lambda range needs 0 < low < high");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    }
  }
  poisson::PoissonConfig p;
  p.level = cfg.level;
  p.replications = cfg.replications;
  p.seed = cfg.seed;
  const auto set = poisson::lambda_adequacy_set(s, grid, p);
  Json r;
  r["sample"] = {{"n", s.size()}, {"mean", s.mean()}, {"k", s.k()}};
  r["family_statistic"] = s.mean() > 0.0 ? num(poisson::chisq_family_stat(s)) : Json(nullptr);
  r["lambda_set"] = {{"level", set.level},
                     {"grid", {{"low", grid.front()}, {"high", grid.back()}, {"points", grid.size()}}},
                     {"adequate_points", set.count()},
                     {"hull", interval_json(set.hull())},
                     {"minimizer", poisson::minimize_statistic(s, grid.front(), grid.back())}};
  std::string csv = "lambda,statistic,critical,adequate\n";
  for (const auto& q : set.profile) {
    csv += format_number(q.lambda) + ',' + format_number(q.statistic) + ',' + format_number(q.critical) + ',' +
           (q.adequate ? "1" : "0") + '\n';
  }
  return {Json{{"results", r}}, csv};
}

RunOutput run_stepwise(const RunConfig& cfg) {
  const auto data = is_dataset_name(cfg.data) ? named_regression(cfg.data, cfg.seed)
                                              : load_regression(cfg.data, cfg.response);
  stepwise::StepwiseConfig sc;
  sc.center = cfg.center;
  const auto sel = stepwise::run_selection(data, cfg.alpha, sc);
  Json steps = Json::array();
  for (const auto& s : sel.steps) {
    steps.push_back({{"index", s.index}, {"label", s.label}, {"ss0", s.ss0}, {"ss01", s.ss01},
                     {"p_value", s.p_value}, {"stopped", s.stopped}});
  }
  Json selected = Json::array(), skipped = Json::array();
  for (std::size_t j : sel.selected) selected.push_back(data.labels()[j]);
  for (const auto& s : sel.skipped) skipped.push_back({{"label", data.labels()[s.index]}, {"step", s.step}});
  Json r;
  r["data"] = {{"n", data.n()}, {"p", data.p()}, {"centered", sel.centered}};
  r["steps"] = steps;
  r["selected"] = selected;
  r["skipped_collinear"] = skipped;
  const auto& y = data.response();
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0 || v == 1.0; })) {
    r["misclassifications"] = stepwise::misclassifications(data, sel.selected, sel.centered);
  }
  return {Json{{"results", r}}, {}};
}

RunOutput run_calibrate(const RunConfig& cfg) {
  const std::size_t n = cfg.n ? *cfg.n : load_sample(cfg).size();
  const gauss::NullTables tables(gauss_config(cfg));
  const auto c = gauss::calibrate(n, cfg.alpha, tables, cfg.fixed_point);
  const auto q = tables.quantile_set(n, c.alpha_tilde);
  Json r;
  r["n"] = n;
  r["calibration"] = {{"alpha", c.alpha},
                      {"alpha_start", c.alpha_start},
                      {"alpha_star", c.alpha_star},
                      {"alpha_tilde", c.alpha_tilde},
                      {"alpha_effective", c.alpha_effective},
                      {"iterations", c.iterations}};
  r["quantiles"] = {{"q1", q.q1}, {"q21", q.q21}, {"q22", q.q22}, {"q3", q.q3}, {"q4", q.q4}};
  return {Json{{"results", r}}, {}};
}

RunOutput run_sweep(const RunConfig& cfg) {
  const auto x = load_sample(cfg);
  const gauss::NullTables tables(gauss_config(cfg));
  gauss::SweepSpec spec;
  spec.mode = cfg.sweep_mode;
  spec.index = cfg.sweep_index;
  spec.step = cfg.sweep_step;
  spec.count = cfg.sweep_count;
  spec.value = cfg.sweep_value;
  spec.alpha = cfg.alpha;
  const auto rows = gauss::outlier_sweep(x, spec, tables, cfg.grid);
  Json out = Json::array();
  std::string csv = "value,n,region_p,points,p_star,mu_low,mu_high\n";
  for (const auto& row : rows) {
    out.push_back({{"value", row.value}, {"n", row.n}, {"region_p", row.region_p}, {"points", row.points},
                   {"p_star", row.p_star}, {"mu_projection", interval_json(row.projection)}});
    csv += format_number(row.value) + ',' + std::to_string(row.n) + ',' + format_number(row.region_p) + ',' +
           std::to_string(row.points) + ',' + format_number(row.p_star) + ',' +
           (row.projection ? format_number(row.projection->low) : "") + ',' +
           (row.projection ? format_number(row.projection->high) : "") + '\n';
  }
  Json r;
  r["sample"] = sample_json(x);
  r["sweep"] = {{"mode", sweep_name(cfg.sweep_mode)}, {"index", cfg.sweep_index}, {"rows", out}};
  return {Json{{"results", r}}, csv};
}

RunOutput run_validate(const RunConfig& cfg) {
  Json r;
  if (cfg.target == "beta-law") {
    const std::size_t n = cfg.n.value_or(20);
    const auto rep = stepwise::validate_beta_law(n, cfg.p0, {n, cfg.replications, cfg.seed, "beta-law"});
    r["beta_law"] = {{"n", rep.n},
                     {"p0", rep.p0},
                     {"replications", rep.replications},
                     {"ks_distance", rep.ks_distance},
                     {"ks_threshold", rep.ks_threshold},
                     {"mean", rep.mean},
                     {"expected_mean", rep.expected_mean},
                     {"mean_se", rep.mean_se},
                     {"passed", rep.passed}};
  } else {
    const std::size_t n = cfg.n.value_or(27);
    mfunc::MConfig m;
    m.c = cfg.c;
    const mfunc::Sampler normal = [](numerics::CounterRng& rng) { return rng.normal(); };
    const double level = (2.0 + cfg.alpha) / 3.0;
    const auto q = mfunc::m_exact_quantiles(normal, level, n, {n, cfg.replications, cfg.seed, "clt"}, m,
                                            mfunc::normal_functional(m));
    const double ratio_psi = q.q_psi / q.asymptotic_psi, ratio_chi = q.q_chi / q.asymptotic_chi;
    r["clt"] = {{"n", n},
                {"alpha_tilde", level},
                {"q_psi", q.q_psi},
                {"asymptotic_psi", q.asymptotic_psi},
                {"q_chi", q.q_chi},
                {"asymptotic_chi", q.asymptotic_chi},
                {"psi_sum_mean", q.psi_sum_mean},
                {"psi_sum_se", q.psi_sum_se},
                {"passed", std::fabs(ratio_psi - 1.0) <= 0.05 && std::fabs(ratio_chi - 1.0) <= 0.05 &&
                               std::fabs(q.psi_sum_mean) <= 4.0 * q.psi_sum_se}};
  }
  return {Json{{"results", r}}, {}};
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

Json config_to_json(const RunConfig& cfg) {
  Json g{{"mu_points", cfg.grid.mu_points},
         {"sigma_points", cfg.grid.sigma_points},
         {"mu_low", optional_json(cfg.grid.mu_low)},
         {"mu_high", optional_json(cfg.grid.mu_high)},
         {"sigma_low", optional_json(cfg.grid.sigma_low)},
         {"sigma_high", optional_json(cfg.grid.sigma_high)}};
  Json replace = Json::array();
  for (const auto& r : cfg.replace) replace.push_back({{"from", r.from}, {"to", r.to}});
  Json at = cfg.at ? Json{{"mu", cfg.at->mu}, {"sigma", cfg.at->sigma}} : Json(nullptr);
  return Json{{"command", cfg.command},
              {"data", cfg.data},
              {"alpha", cfg.alpha},
              {"seed", cfg.seed},
              {"t4_replications", cfg.t4_replications},
              {"calibration_replications", cfg.calibration_replications},
              {"region_p_replications", cfg.region_p_replications},
              {"replications", cfg.replications},
              {"grid", g},
              {"replace", replace},
              {"drop", cfg.drop},
              {"at", at},
              {"region_p", cfg.region_p},
              {"emptiness", cfg.emptiness},
              {"subsample", cfg.subsample},
              {"bound", cfg.bound},
              {"direction", direction_name(cfg.direction)},
              {"c", cfg.c},
              {"level", cfg.level},
              {"k", optional_json(cfg.k)},
              {"lambda_points", cfg.lambda_points},
              {"lambda_low", optional_json(cfg.lambda_low)},
              {"lambda_high", optional_json(cfg.lambda_high)},
              {"response", cfg.response},
              {"center", cfg.center},
              {"n", optional_json(cfg.n)},
              {"fixed_point", cfg.fixed_point},
              {"target", cfg.target},
              {"p0", cfg.p0},
              {"sweep", {{"mode", sweep_name(cfg.sweep_mode)},
                         {"index", cfg.sweep_index},
                         {"step", cfg.sweep_step},
                         {"count", cfg.sweep_count},
                         {"value", cfg.sweep_value}}}};
}

RunConfig config_from_json(const Json& j) {
  try {
    RunConfig cfg;
    cfg.command = j.at("command").get<std::string>();
    if (std::find(command_names().begin(), command_names().end(), cfg.command) == command_names().end()) {
      throw UsageError("unknown command '" + cfg.command + "' in config");
    }
    cfg.data = j.at("data").get<std::string>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.t4_replications = j.at("t4_replications").get<std::size_t>();
    cfg.calibration_replications = j.at("calibration_replications").get<std::size_t>();
    cfg.region_p_replications = j.at("region_p_replications").get<std::size_t>();
    cfg.replications = j.at("replications").get<std::size_t>();
    const Json& g = j.at("grid");
    cfg.grid.mu_points = g.at("mu_points").get<std::size_t>();
    cfg.grid.sigma_points = g.at("sigma_points").get<std::size_t>();
    cfg.grid.mu_low = optional_from<double>(g, "mu_low");
    cfg.grid.mu_high = optional_from<double>(g, "mu_high");
    cfg.grid.sigma_low = optional_from<double>(g, "sigma_low");
    cfg.grid.sigma_high = optional_from<double>(g, "sigma_high");
    for (const auto& r : j.at("replace")) cfg.replace.push_back({r.at("from").get<double>(), r.at("to").get<double>()});
    cfg.drop = j.at("drop").get<std::vector<double>>();
    if (!j.at("at").is_null()) cfg.at = gauss::LocationScale{j.at("at").at("mu"), j.at("at").at("sigma")};
    cfg.region_p = j.at("region_p").get<bool>();
    cfg.emptiness = j.at("emptiness").get<bool>();
    cfg.subsample = j.at("subsample").get<bool>();
    cfg.bound = j.at("bound").get<double>();
    const auto dir = j.at("direction").get<std::string>();
    if (dir != "at-least" && dir != "at-most") throw UsageError("unknown direction '" + dir + "' in config");
    cfg.direction = dir == "at-least" ? gauss::Direction::AtLeast : gauss::Direction::AtMost;
    cfg.c = j.at("c").get<double>();
    cfg.level = j.at("level").get<double>();
    cfg.k = optional_from<int>(j, "k");
    cfg.lambda_points = j.at("lambda_points").get<std::size_t>();
    cfg.lambda_low = optional_from<double>(j, "lambda_low");
    cfg.lambda_high = optional_from<double>(j, "lambda_high");
    cfg.response = j.at("response").get<std::string>();
    cfg.center = j.at("center").get<bool>();
    cfg.n = optional_from<std::size_t>(j, "n");
    cfg.fixed_point = j.at("fixed_point").get<bool>();
    cfg.target = j.at("target").get<std::string>();
    cfg.p0 = j.at("p0").get<std::size_t>();
    const Json& s = j.at("sweep");
    const auto mode = s.at("mode").get<std::string>();
    if (mode == "shift") cfg.sweep_mode = gauss::SweepMode::Shift;
    else if (mode == "set") cfg.sweep_mode = gauss::SweepMode::Set;
    else if (mode == "drop") cfg.sweep_mode = gauss::SweepMode::Drop;
    else throw UsageError("unknown sweep mode '" + mode + "' in config");
    cfg.sweep_index = s.at("index").get<std::size_t>();
    cfg.sweep_step = s.at("step").get<double>();
    cfg.sweep_count = s.at("count").get<std::size_t>();
    cfg.sweep_value = s.at("value").get<double>();
    return cfg;
  } catch (const Json::exception& e) {
    throw UsageError(std::string("malformed config block: ") + e.what());
  }
}

RunOutput run_command(const RunConfig& cfg) {
  RunOutput out;
  if (cfg.command == "gauss") out = run_gauss(cfg);
  else if (cfg.command == "gauss-test") out = run_gauss_test(cfg);
  else if (cfg.command == "m-region") out = run_m_region(cfg);
  else if (cfg.command == "m-test") out = run_m_test(cfg);
  else if (cfg.command == "poisson") out = run_poisson(cfg);
  else if (cfg.command == "stepwise") out = run_stepwise(cfg);
  else if (cfg.command == "calibrate") out = run_calibrate(cfg);
  else if (cfg.command == "sweep") out = run_sweep(cfg);
  else if (cfg.command == "validate") out = run_validate(cfg);
  else throw UsageError("unknown command '" + cfg.command + "'");
  Json summary{{"schema", kSchema}, {"command", cfg.command}, {"config", config_to_json(cfg)}};
  summary["results"] = std::move(out.summary["results"]);
  out.summary = std::move(summary);
  return out;
}

std::string emit_outputs(const RunOutput& out, const RunConfig& cfg) {
  const std::string text = out.summary.dump(2) + '\n';
  auto write = [](const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    f << body;
    if (!f) throw ConfigurationError("cannot write " + path);
  };
  if (!cfg.json_out.empty()) write(cfg.json_out, text);
  if (!cfg.csv_out.empty()) {
    if (out.csv.empty()) throw ConfigurationError("command '" + cfg.command + "' has no CSV output");
    write(cfg.csv_out, out.csv);
  }
  return text;
}

}  // namespace adequate::io
