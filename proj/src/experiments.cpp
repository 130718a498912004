#include "experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "serialize.hpp"
#include "tractlab/error.hpp"
#include "tractlab/fncat.hpp"
#include "tractlab/logvar.hpp"
#include "tractlab/measure.hpp"
#include "tractlab/schroeder.hpp"
#include "tractlab/tracts.hpp"

namespace tractlab {

using nlohmann::json;
using std::numbers::pi;

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    default: return "NONE";
  }
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

double to_double(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    fail(ErrorCode::Parameter, "key '" + key + "': '" + t + "' is not a number");
  return x;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig(std::map<std::string, std::string> values) : values_(std::move(values)) {}

ExperimentConfig ExperimentConfig::from_json(const json& object) {
  if (!object.is_object()) fail(ErrorCode::Parameter, "configuration must be a JSON object");
  std::map<std::string, std::string> values;
  for (const auto& [key, value] : object.items()) {
    if (value.is_string()) values[key] = value.get<std::string>();
    else if (value.is_boolean()) values[key] = value.get<bool>() ? "true" : "false";
    else if (value.is_number_integer()) values[key] = std::to_string(value.get<long long>());
    else if (value.is_number()) values[key] = format_double(value.get<double>());
    else fail(ErrorCode::Parameter, "configuration value for '" + key + "' must be a scalar");
  }
  return ExperimentConfig(std::move(values));
}

bool ExperimentConfig::has(const std::string& key) const { return values_.count(key) != 0; }

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) {
  const auto it = values_.find(key);
  read_[key] = true;
  const std::string v = it == values_.end() ? fallback : it->second;
  resolved_[key] = v;
  return v;
}

std::string ExperimentConfig::text(const std::string& key) {
  if (!has(key)) fail(ErrorCode::Parameter, "missing required key '" + key + "'");
  return text(key, "");
}

double ExperimentConfig::number(const std::string& key, double fallback) {
  read_[key] = true;
  const auto it = values_.find(key);
  const double v = it == values_.end() ? fallback : to_double(key, it->second);
  resolved_[key] = v;
  return v;
}

double ExperimentConfig::number(const std::string& key) {
  if (!has(key)) fail(ErrorCode::Parameter, "missing required key '" + key + "'");
  return number(key, 0.0);
}

int ExperimentConfig::integer(const std::string& key, int fallback) {
  read_[key] = true;
  const auto it = values_.find(key);
  int v = fallback;
  if (it != values_.end()) {
    const std::string t = trim(it->second);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
      fail(ErrorCode::Parameter, "key '" + key + "': '" + t + "' is not an integer");
  }
  resolved_[key] = v;
  return v;
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) {
  read_[key] = true;
  const auto it = values_.find(key);
  bool v = fallback;
  if (it != values_.end()) {
    const std::string t = trim(it->second);
    if (t == "true" || t == "1" || t == "yes" || t == "on") v = true;
    else if (t == "false" || t == "0" || t == "no" || t == "off") v = false;
    else fail(ErrorCode::Parameter, "key '" + key + "': '" + t + "' is not a boolean");
  }
  resolved_[key] = v;
  return v;
}

std::vector<double> ExperimentConfig::numbers(const std::string& key, const std::vector<double>& fallback) {
  read_[key] = true;
  const auto it = values_.find(key);
  std::vector<double> v = fallback;
  if (it != values_.end()) {
    v.clear();
    for (const std::string& part : split(it->second, ',')) v.push_back(to_double(key, part));
  }
  resolved_[key] = v;
  return v;
}

std::pair<double, double> ExperimentConfig::range(const std::string& key, std::pair<double, double> fallback) {
  read_[key] = true;
  const auto it = values_.find(key);
  auto v = fallback;
  if (it != values_.end()) {
    const auto parts = split(it->second, ':');
    if (parts.size() != 2) fail(ErrorCode::Parameter, "key '" + key + "' expects a:b");
    v = {to_double(key, parts[0]), to_double(key, parts[1])};
  }
  resolved_[key] = format_double(v.first) + ":" + format_double(v.second);
  return v;
}

std::vector<std::string> ExperimentConfig::unused() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_)
    if (!read_.count(key)) out.push_back(key);
  return out;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json region_json(const SquareRegion& r) { return {{"center", complex_json(r.center)}, {"side", r.side}}; }

Verdict verdict_of(bool pass) { return pass ? Verdict::Pass : Verdict::Fail; }

struct Context {
  ExperimentConfig& cfg;
  ExperimentResult& out;
  unsigned threads = 0;

  FunctionSpec spec(const std::string& fallback) { return parse_spec(cfg.text("spec", fallback)); }

  std::vector<double> radii(std::pair<double, double> range, int n) {
    const auto [a, b] = cfg.range("radii", range);
    const int count = cfg.integer("n", n);
    if (!(a > 0.0 && b > a) || count < 2) fail(ErrorCode::Parameter, "radii need 0 < a < b and n >= 2");
    return log_spaced(a, b, count);
  }

  double threshold(const FunctionSpec& f) {
    const double sb = cfg.number("singular_bound", 10.0);
    return cfg.number("R", default_threshold(f, sb));
  }

  TractDecomposition decomposition(const FunctionSpec& f, std::pair<double, double> annulus,
                                   int n_theta = 1024) {
    const double R = threshold(f);
    GridParams g;
    std::tie(g.r_min, g.r_max) = cfg.range("annulus", annulus);
    g.n_theta = cfg.integer("ntheta", n_theta);
    g.rings_per_decade = cfg.integer("rings_per_decade", 512);
    g.threads = threads;
    return decompose(f, R, g);
  }

  // Files are rendered after the command finishes so that they embed the final
  // resolved configuration.
  std::vector<std::pair<std::string, std::function<std::string(const json&)>>> pending;

  void csv(const std::string& name, std::vector<CsvColumn> cols) {
    pending.emplace_back(name, [cols = std::move(cols)](const json& config) { return write_csv(cols, config); });
  }
};

json grid_json(const TractDecomposition& dec) {
  return {{"r_min", dec.grid.r_edges.front()},
          {"r_max", dec.grid.r_edges.back()},
          {"n_r", dec.grid.n_r()},
          {"n_theta", dec.grid.n_theta}};
}

json profile_summary(const RadialProfile& p) {
  const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
  int full = 0;
  for (auto f : p.full_ring) full += f;
  return {{"kind", to_string(p.kind)},
          {"rings", p.radii.size()},
          {"min", p.values.empty() ? 0.0 : *lo},
          {"max", p.values.empty() ? 0.0 : *hi},
          {"full_rings", full}};
}

int first_tract(const TractDecomposition& dec) {
  if (dec.tract_ids.empty()) fail(ErrorCode::Domain, "the decomposition has no tract");
  return dec.tract_ids.front();
}

std::vector<int> selected_components(Context& c, const TractDecomposition& dec) {
  const int comp = c.cfg.integer("component", 0);
  if (comp != 0) return {comp};
  if (dec.tract_ids.empty()) fail(ErrorCode::Domain, "the decomposition has no tract");
  return dec.tract_ids;
}

void cmd_eval(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const Complex z = parse_complex(c.cfg.text("z"));
  const Evaluation e = eval(f, z);
  const LogModulus lm = log_modulus(f, z);
  c.out.report["z"] = complex_json(z);
  c.out.report["value"] = e.overflow ? json(nullptr) : complex_json(e.value);
  c.out.report["value_text"] = e.overflow ? "overflow" : format_complex(e.value);
  c.out.report["log_value"] = complex_json(e.log_value);
  c.out.report["overflow"] = e.overflow;
  c.out.report["log_modulus"] = lm.value;
  c.out.report["overflow_safe"] = lm.overflow_safe;
}

void cmd_maxmod(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const std::vector<double> radii = c.radii({10.0, 1e4}, 31);
  const RadialProfile p = loglogm_profile(f, radii, c.cfg.integer("samples", 256));
  c.out.report["radii"] = p.radii;
  c.out.report["loglogm"] = p.values;
  bool monotone = true;
  for (std::size_t k = 1; k < p.values.size(); ++k) monotone = monotone && p.values[k] >= p.values[k - 1];
  c.out.report["nondecreasing"] = monotone;
  c.out.verdict = verdict_of(monotone);
  c.csv("maxmod.csv", {{"r", p.radii}, {"value", p.values}});
}

void cmd_order(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const auto [a, b] = c.cfg.range("radii", {10.0, 1e4});
  const int n = c.cfg.integer("n", 31);
  const double order = order_estimate(f, a, b, n, c.cfg.integer("samples", 256));
  c.out.report["order"] = order;
  if (c.cfg.has("expected")) {
    const double expected = c.cfg.number("expected");
    const double tol = c.cfg.number("tolerance", 0.05);
    c.out.report["error"] = order - expected;
    c.out.verdict = verdict_of(std::abs(order - expected) <= tol);
  }
}

json decomposition_json(const TractDecomposition& dec) {
  json comps = json::array();
  for (const ComponentInfo& ci : dec.components)
    comps.push_back({{"id", ci.id},
                     {"cells", ci.cells},
                     {"touches_inner", ci.touches_inner},
                     {"touches_outer", ci.touches_outer}});
  return {{"R", dec.R},
          {"grid", grid_json(dec)},
          {"n_components", dec.n_components()},
          {"tract_ids", dec.tract_ids},
          {"island_ids", dec.island_ids},
          {"components", comps},
          {"warnings", dec.warnings}};
}

void cmd_tracts(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const TractDecomposition dec = c.decomposition(f, {5.0, 100.0});
  c.out.report["decomposition"] = decomposition_json(dec);
  c.out.report["n_components"] = dec.n_components();
  bool pass = true;
  bool checked = false;
  if (c.cfg.flag("doubling", false)) {
    GridParams g;
    g.r_min = dec.grid.r_edges.front();
    g.r_max = dec.grid.r_edges.back();
    g.n_theta = 2 * dec.grid.n_theta;
    g.n_r = dec.grid.n_r();
    g.threads = c.threads;
    const int doubled = decompose(f, dec.R, g).n_components();
    c.out.report["n_components_doubled"] = doubled;
    c.out.report["stable_under_doubling"] = doubled == dec.n_components();
    pass = doubled == dec.n_components();
    checked = true;
  }
  if (c.cfg.has("expected_n")) {
    pass = pass && dec.n_components() == c.cfg.integer("expected_n", 0);
    checked = true;
  }
  if (checked) c.out.verdict = verdict_of(pass);
}

void cmd_theta(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const TractDecomposition dec = c.decomposition(f, {5.0, 100.0});
  const bool star = c.cfg.flag("star", false);
  json profiles = json::object();
  std::vector<double> sum(dec.grid.n_r(), 0.0);
  for (int id : selected_components(c, dec)) {
    const RadialProfile p = theta_profile(dec, id, star);
    profiles[std::to_string(id)] = profile_summary(p);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p.values[i];
    std::vector<CsvColumn> cols{{"r", p.radii}, {"value", p.values}};
    if (star) cols.push_back({"full_ring", std::vector<double>(p.full_ring.begin(), p.full_ring.end())});
    c.csv("theta_" + std::to_string(id) + ".csv", cols);
  }
  c.out.report["R"] = dec.R;
  c.out.report["grid"] = grid_json(dec);
  c.out.report["profiles"] = profiles;
  const bool disjoint = std::all_of(sum.begin(), sum.end(), [](double s) { return s <= 2.0 * pi + 1e-9; });
  c.out.report["sum_at_most_2pi"] = disjoint;
  c.out.verdict = verdict_of(disjoint);
}

void cmd_psi(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const TractDecomposition dec = c.decomposition(f, {5.0, 100.0});
  const double beta = c.cfg.number("beta", 0.25);
  json profiles = json::object();
  bool ordered = true;
  for (int id : selected_components(c, dec)) {
    const RadialProfile p = psi_profile(dec, beta, id);
    const RadialProfile t = theta_profile(dec, id);
    for (std::size_t i = 0; i < p.values.size(); ++i) ordered = ordered && p.values[i] <= t.values[i];
    profiles[std::to_string(id)] = profile_summary(p);
    c.csv("psi_" + std::to_string(id) + ".csv", {{"r", p.radii}, {"value", p.values}});
  }
  std::vector<RadialProfile> per_tract;
  for (int id : dec.tract_ids) per_tract.push_back(psi_profile(dec, beta, id));
  const AggregationReport agg = cauchy_schwarz_check(per_tract);
  const DeficiencyReport def = deficiency_integral(psi_total(dec, beta), c.cfg.number("r0", 10.0));
  c.out.report["R"] = dec.R;
  c.out.report["grid"] = grid_json(dec);
  c.out.report["profiles"] = profiles;
  c.out.report["psi_le_theta"] = ordered;
  c.out.report["cauchy_schwarz"] = {{"rings_checked", agg.rings_checked}, {"violations", agg.violations}};
  c.out.report["deficiency"] = {{"decreasing_top_decade", def.decreasing_top_decade},
                                {"final_integral", def.integral.empty() ? 0.0 : def.integral.back()},
                                {"final_ratio", def.ratio.empty() ? 0.0 : def.ratio.back()}};
  c.csv("deficiency.csv", {{"r", def.radii}, {"integral", def.integral}, {"ratio", def.ratio}});
  c.out.verdict = verdict_of(ordered && agg.violations == 0);
}

void cmd_tsuji(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const TractDecomposition dec = c.decomposition(f, {5.0, 1e4});
  const double beta = c.cfg.number("beta", 0.25);
  const double r0 = c.cfg.number("r0", 10.0);
  const double kappa = c.cfg.number("kappa", 0.5);
  const double budget = c.cfg.number("budget", 5.0);
  const int component = c.cfg.integer("component", 0);
  const std::vector<double> radii = c.radii({1e2, 1e4}, 21);
  const Theorem2Report rep = verify_theorem2(f, dec, beta, r0, kappa, radii, component, budget);

  // Tsuji's theta* integral for the selected tract (the first one for totals).
  const RadialProfile star = theta_profile(dec, component == 0 ? first_tract(dec) : component, true);
  std::vector<double> theta_integral;
  bool extrapolated = false;
  for (double r : radii) {
    const TsujiResult t = tsuji_integral(star, r0, kappa, r);
    theta_integral.push_back(t.infinite ? INFINITY : t.value);
    extrapolated = extrapolated || t.extrapolated;
  }

  c.out.report["R"] = dec.R;
  c.out.report["grid"] = grid_json(dec);
  c.out.report["n_components"] = dec.n_components();
  c.out.report["theorem2"] = {{"component", rep.component}, {"inf", rep.inf},
                              {"budget", rep.budget},       {"pass", rep.pass},
                              {"final_ratio", rep.final_ratio},
                              {"excluded_rings", rep.excluded_rings.size()}};
  c.out.report["theta_star_integral_extrapolated"] = extrapolated;
  bool pass = rep.pass;
  if (c.cfg.has("ratio_band")) {
    const auto [lo, hi] = c.cfg.range("ratio_band", {0.8, 1.2});
    const bool in_band = std::abs(rep.final_ratio) >= lo && std::abs(rep.final_ratio) <= hi;
    c.out.report["ratio_in_band"] = in_band;
    pass = pass && in_band;
  }
  c.out.verdict = verdict_of(pass);
  c.csv("tsuji.csv", {{"r", radii},
                      {"loglogm", rep.loglogm},
                      {"psi_integral", rep.integral},
                      {"residual", rep.residual},
                      {"theta_star_integral", theta_integral}});
}

int component_count(Context& c, const FunctionSpec& f) {
  if (c.cfg.has("N")) return c.cfg.integer("N", 1);
  const TractDecomposition dec = c.decomposition(f, {5.0, 100.0});
  c.out.report["R"] = dec.R;
  return dec.n_components();
}

void cmd_dca(Context& c) {
  const FunctionSpec f = c.spec("sin");
  const int n = component_count(c, f);
  const std::vector<double> radii = c.radii({10.0, 1e4}, 31);
  const DcaReport rep = verify_dca(f, n, radii, c.cfg.number("budget", 5.0));
  c.out.report["N"] = n;
  c.out.report["min_residual"] = rep.min;
  c.out.report["max_residual"] = rep.max;
  c.out.report["bounded_below"] = rep.bounded_below;
  bool pass = rep.bounded_below;
  if (c.cfg.has("max_abs_residual")) {
    const double cap = c.cfg.number("max_abs_residual");
    const bool within = std::max(std::abs(rep.min), std::abs(rep.max)) <= cap;
    c.out.report["within_max_abs_residual"] = within;
    pass = pass && within;
  }
  c.out.verdict = verdict_of(pass);
  c.csv("dca.csv", {{"r", rep.radii}, {"loglogm", rep.loglogm}, {"residual", rep.residual}});
}

void cmd_hypothesis(Context& c) {
  const FunctionSpec f = c.spec("sin");
  const int n = component_count(c, f);
  const SchroederSolution sol = fixed_point(c.cfg.number("beta", 0.2));
  const std::vector<double> radii = c.radii({1e2, 1e6}, 41);
  const HypothesisReport rep = theorem1_hypothesis(f, n, sol, radii);
  c.out.report["N"] = n;
  c.out.report["xi"] = sol.xi;
  c.out.report["min_margin"] = rep.min_margin;
  c.out.report["pass"] = rep.pass;
  c.out.verdict = verdict_of(rep.pass);
  c.csv("hypothesis.csv",
        {{"r", rep.radii}, {"epsilon", rep.epsilon}, {"loglogm", rep.loglogm}, {"margin", rep.margin}});
}

void cmd_schroeder(Context& c) {
  const double beta = c.cfg.number("beta", 0.2);
  const SchroederSolution sol = fixed_point(beta, c.cfg.number("tol", 1e-12), c.cfg.integer("depth", 200));
  std::vector<double> xs = c.cfg.numbers("x", {});
  if (xs.empty()) {
    const double lo = c.cfg.number("xmin", sol.xi + 0.01);
    const double hi = c.cfg.number("xmax", 1e8);
    xs = log_spaced(lo, hi, c.cfg.integer("n", 200));
  }
  std::vector<double> phis, eps, residual;
  double worst = 0.0;
  bool decreasing = true;
  for (double x : xs) {
    const double p = phi(sol, x);
    const double image = phi_from_log(sol, beta * x);  // Phi(exp(beta x))
    const double res = std::abs(image - sol.mu * p) / (1.0 + sol.mu * p);
    if (!eps.empty()) decreasing = decreasing && 1.0 / p < eps.back();
    phis.push_back(p);
    eps.push_back(1.0 / p);
    residual.push_back(res);
    worst = std::max(worst, res);
  }
  const double fp_residual = std::abs(std::exp(beta * sol.xi) - sol.xi) / sol.xi;
  c.out.report["beta"] = beta;
  c.out.report["xi"] = sol.xi;
  c.out.report["mu"] = sol.mu;
  c.out.report["fixed_point_residual"] = fp_residual;
  c.out.report["max_functional_residual"] = worst;
  c.out.report["epsilon_decreasing"] = decreasing;
  bool pass = worst <= 1e-8 && decreasing && fp_residual <= 1e-10;

  if (c.cfg.has("x0")) {
    const double x0 = c.cfg.number("x0");
    const DeltaSequence d = delta_sequence(sol, x0, c.cfg.integer("n_delta", 20));
    if (d.delta.size() < 2) fail(ErrorCode::Domain, "delta sequence has fewer than two terms");
    const double eta = c.cfg.number("eta", 0.1 / d.delta[1]);
    const std::vector<double> prod = partial_products(d.delta, eta);
    const bool above = !prod.empty() && prod.back() > 0.75;
    c.out.report["delta"] = {{"values", d.delta}, {"bound", d.bound}, {"truncated", d.truncated},
                             {"eta", eta},        {"partial_products", prod},
                             {"limit_above_three_quarters", above}};
    pass = pass && above;
    c.csv("delta.csv", {{"n", [&] {
                           std::vector<double> idx;
                           for (std::size_t k = 0; k < d.delta.size(); ++k) idx.push_back(double(k));
                           return idx;
                         }()},
                        {"delta", d.delta},
                        {"bound", d.bound}});
  }
  c.out.verdict = verdict_of(pass);
  c.csv("schroeder.csv", {{"x", xs}, {"phi", phis}, {"epsilon", eps}, {"residual", residual}});
}

void cmd_mprofile(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const TractDecomposition dec = c.decomposition(f, {50.0, 1e4});
  const double beta = c.cfg.number("beta", 0.25);
  const int comp = c.cfg.integer("component", first_tract(dec));
  const RadialProfile m = m_profile(dec, beta, comp);
  const ConvexityReport conv = convexity_check(m, c.cfg.number("tol", 1e-3), c.cfg.number("r_start", 0.0));
  std::vector<double> ratio;
  for (std::size_t i = 0; i < m.radii.size(); ++i) ratio.push_back(m.values[i] / m.radii[i]);
  c.out.report["R"] = dec.R;
  c.out.report["grid"] = grid_json(dec);
  c.out.report["component"] = comp;
  c.out.report["convexity"] = {{"pass", conv.pass},
                               {"threshold", conv.threshold},
                               {"min_second_difference", conv.min_second_difference},
                               {"first_violation", conv.first_violation}};
  bool pass = conv.pass;
  if (c.cfg.has("band")) {
    const auto [lo, hi] = c.cfg.range("band", {0.05, 10.0});
    const auto [a, b] = c.cfg.range("band_radii", {1e2, 1e4});
    double rmin = INFINITY, rmax = -INFINITY;
    for (std::size_t i = 0; i < m.radii.size(); ++i) {
      if (m.radii[i] < a || m.radii[i] > b) continue;
      rmin = std::min(rmin, ratio[i]);
      rmax = std::max(rmax, ratio[i]);
    }
    const bool in_band = rmin >= lo && rmax <= hi;
    c.out.report["m_over_r"] = {{"min", rmin}, {"max", rmax}, {"in_band", in_band}};
    pass = pass && in_band;
  }
  c.out.verdict = verdict_of(pass);
  c.csv("mprofile.csv", {{"r", m.radii}, {"m", m.values}, {"m_over_r", ratio}});
}

void cmd_logvar(Context& c) {
  const FunctionSpec f = c.spec("exp");
  const double R = c.threshold(f);
  const double beta = c.cfg.number("beta", 0.25);
  bool pass = true;
  if (c.cfg.has("z")) {
    const Complex z = parse_complex(c.cfg.text("z"));
    const OrbitRecord orbit = iterate_T(f, R, beta, z, c.cfg.integer("n_max", 6));
    c.out.report["orbit"] = {{"length", orbit.states.size()},
                             {"exit_index", orbit.exit_index ? json(*orbit.exit_index) : json(nullptr)},
                             {"escape_flag", orbit.escape_flag},
                             {"certified_by_overflow", orbit.certified_by_overflow},
                             {"lower_bound_held", orbit.lower_bound_held}};
    c.pending.emplace_back("orbit.csv", [orbit, beta](const json& config) {
      std::ostringstream csv;
      csv << "# tractlab " << library_version() << "\n# config " << config.dump() << "\n";
      write_orbit_csv(csv, orbit, beta);
      return csv.str();
    });
    pass = orbit.lower_bound_held || orbit.exit_index.has_value();
  }
  SampleBox box;
  std::tie(box.re_min, box.re_max) = c.cfg.range("box_re", {0.0, 5.0});
  std::tie(box.im_min, box.im_max) = c.cfg.range("box_im", {-pi, pi});
  const double margin = c.cfg.number("margin", 1.0);
  const int count = c.cfg.integer("samples", 1000);
  const auto seed = static_cast<std::uint64_t>(c.cfg.integer("seed", 42));
  const std::vector<Complex> pts = sample_W(f, R, margin, box, count, seed);
  const ExpansionReport exp = check_expansion(f, R, pts, margin);
  c.out.report["R"] = R;
  c.out.report["expansion"] = {{"checked", exp.checked},
                               {"skipped", exp.skipped},
                               {"violations", exp.violations},
                               {"min_ratio", exp.min_ratio}};
  c.out.verdict = verdict_of(pass && exp.violations == 0 && exp.checked > 0);
}

EscapeGridReport escape_report(Context& c, const FunctionSpec& f, const std::string& kind, int resolution,
                               int n_max) {
  const Complex center = parse_complex(c.cfg.text("center", kind == "zplane" ? "3.141592653589793+3.141592653589793i" : "40"));
  SquareRegion region;
  if (c.cfg.has("side")) region = {center, c.cfg.number("side")};
  else region = kind == "zplane" ? SquareRegion{center, 2.0 * pi} : q_square(center);
  const GridOptions opts{c.threads};
  if (kind == "zplane") return z_plane_escape_density(f, region, resolution, n_max, c.cfg.number("escape_radius", 100.0), opts);
  if (kind != "tn") fail(ErrorCode::Parameter, "kind must be 'zplane' or 'tn'");
  const double R = c.threshold(f);
  const double beta = c.cfg.number("beta", 0.25);
  if (c.cfg.text("mode", "grid") == "monte_carlo")
    return tn_density_monte_carlo(f, R, beta, region, c.cfg.integer("samples", 100000), n_max,
                                  static_cast<std::uint64_t>(c.cfg.integer("seed", 42)), opts);
  return tn_density(f, R, beta, region, resolution, n_max, opts);
}

json escape_json(const EscapeGridReport& r) {
  return {{"kind", r.kind == EscapeKind::ZPlane ? "zplane" : "tn"},
          {"region", region_json(r.region)},
          {"resolution", r.resolution},
          {"n_max", r.n_max},
          {"mode", r.mode},
          {"seed", r.seed},
          {"cells", r.cell_exit.size()},
          {"density_sequence", r.density_sequence},
          {"relative_to_T0", r.relative_to_T0},
          {"refinement_parent", r.refinement_parent ? json(*r.refinement_parent) : json(nullptr)},
          {"nonincreasing", density_nonincreasing(r)}};
}

void cmd_escape(Context& c) {
  const std::string kind = c.cfg.text("kind", "zplane");
  const FunctionSpec f = c.spec("sin");
  const int res = c.cfg.integer("resolution", 512);
  const EscapeGridReport r = escape_report(c, f, kind, res, c.cfg.integer("n_max", kind == "zplane" ? 20 : 6));
  c.out.report["escape"] = escape_json(r);
  c.out.verdict = verdict_of(density_nonincreasing(r));
  std::vector<double> idx;
  for (std::size_t k = 0; k < r.density_sequence.size(); ++k) idx.push_back(double(k));
  c.csv("density.csv", {{"n", idx}, {"density", r.density_sequence}, {"relative_to_T0", r.relative_to_T0}});
  if (r.resolution > 0) {
    // Raster rows run top to bottom, the report's rows bottom to top.
    const std::vector<std::uint8_t> cells = exit_raster(r);
    std::vector<std::uint8_t> img(cells.size());
    const std::size_t w = r.resolution;
    for (std::size_t i = 0; i < w; ++i)
      std::copy_n(cells.begin() + (w - 1 - i) * w, w, img.begin() + i * w);
    const int w_px = r.resolution;
    c.pending.emplace_back("escape.pgm", [img = std::move(img), w_px](const json& config) {
      return write_pgm(img, w_px, w_px, config);
    });
  }
}

void cmd_refine(Context& c) {
  const std::string kind = c.cfg.text("kind", "zplane");
  const FunctionSpec f = c.spec("sin");
  const std::string mode_text = c.cfg.text("study", "positive");
  RefinementMode mode;
  if (mode_text == "positive") mode = RefinementMode::Positive;
  else if (mode_text == "shrinking") mode = RefinementMode::Shrinking;
  else fail(ErrorCode::Parameter, "study must be 'positive' or 'shrinking'");
  const std::vector<double> res = c.cfg.numbers("resolutions", {256, 512, 1024});
  if (res.size() < 2) fail(ErrorCode::Parameter, "refinement needs at least two resolutions");
  const int n_max = c.cfg.integer("n_max", kind == "zplane" ? 20 : 6);
  std::vector<EscapeGridReport> chain;
  json reports = json::array();
  for (double r : res) {
    if (r != std::floor(r) || r < 1) fail(ErrorCode::Parameter, "resolutions must be positive integers");
    chain.push_back(escape_report(c, f, kind, static_cast<int>(r), n_max));
    if (chain.size() > 1) chain.back().refinement_parent = chain[chain.size() - 2].resolution;
    reports.push_back(escape_json(chain.back()));
  }
  const RefinementReport rep = refinement_study(chain, mode, c.cfg.number("tolerance", 0.25));
  c.out.report["reports"] = reports;
  c.out.report["refinement"] = {{"mode", mode_text},
                                {"resolutions", rep.resolutions},
                                {"tails", rep.tails},
                                {"relative_changes", rep.relative_changes},
                                {"shrinking", std::vector<bool>(rep.shrinking.begin(), rep.shrinking.end())},
                                {"tolerance", rep.tolerance},
                                {"pass", rep.pass}};
  c.out.verdict = verdict_of(rep.pass);
}

using Handler = std::function<void(Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"eval", cmd_eval},         {"maxmod", cmd_maxmod},     {"order", cmd_order},
      {"tracts", cmd_tracts},     {"theta", cmd_theta},       {"psi", cmd_psi},
      {"tsuji", cmd_tsuji},       {"dca", cmd_dca},           {"hypothesis", cmd_hypothesis},
      {"schroeder", cmd_schroeder}, {"mprofile", cmd_mprofile}, {"logvar", cmd_logvar},
      {"escape", cmd_escape},     {"refine", cmd_refine},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> names{"eval",       "maxmod",    "order",    "tracts", "theta",
                                              "psi",        "tsuji",     "dca",      "hypothesis",
                                              "schroeder",  "mprofile",  "logvar",   "escape", "refine"};
  return names;
}

ExperimentResult run_experiment(const std::string& command, ExperimentConfig config) {
  const auto it = handlers().find(command);
  if (it == handlers().end()) fail(ErrorCode::Parameter, "unknown command '" + command + "'");
  ExperimentResult result;
  result.command = command;
  Context ctx{config, result, 0, {}};
  ctx.threads = static_cast<unsigned>(std::max(0, config.integer("threads", 0)));
  it->second(ctx);
  const std::vector<std::string> unused = config.unused();
  if (!unused.empty()) {
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    fail(ErrorCode::Parameter, "keys not used by '" + command + "': " + list);
  }
  json cfg = config.resolved();
  cfg.erase("threads");  // does not affect results
  result.report["command"] = command;
  result.report["config"] = cfg;
  result.report["version"] = library_version();
  result.report["verdict"] = to_string(result.verdict);
  result.files.push_back({command + ".json", write_json(result.report)});
  for (const auto& [name, render] : ctx.pending) result.files.push_back({name, render(cfg)});
  return result;
}

}  // namespace tractlab
