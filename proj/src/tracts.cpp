#include "tractlab/tracts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "parallel.hpp"
#include "tractlab/error.hpp"

namespace tractlab {
namespace {

using std::numbers::pi;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

void check_component(const TractDecomposition& dec, int component) {
  if (component < 1 || component > static_cast<int>(dec.components.size()))
    fail(ErrorCode::Parameter, "no component with id " + std::to_string(component));
}

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 0.5)) fail(ErrorCode::Parameter, "beta must lie in (0, 1/2)");
}

bool is_tract(const TractDecomposition& dec, int label) {
  return label > 0 && dec.components[label - 1].touches_outer;
}

// Linear interpolation of g in u = log t at the point u, flat outside the samples.
double interpolate(const std::vector<double>& u, const std::vector<double>& g, double x, bool& outside) {
  if (x <= u.front()) {
    outside = outside || x < u.front();
    return g.front();
  }
  if (x >= u.back()) {
    outside = outside || x > u.back();
    return g.back();
  }
  const auto it = std::upper_bound(u.begin(), u.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - u.begin());
  const double w = (x - u[k - 1]) / (u[k] - u[k - 1]);
  if (std::isinf(g[k - 1]) && w < 1.0) return g[k - 1];
  if (std::isinf(g[k]) && w > 0.0) return g[k];
  return (1.0 - w) * g[k - 1] + w * g[k];
}

}  // namespace

PolarGrid PolarGrid::make(const GridParams& p) {
  if (!(p.r_min > 0.0 && p.r_max > p.r_min && std::isfinite(p.r_max)))
    fail(ErrorCode::Parameter, "grid needs 0 < r_min < r_max");
  if (p.n_theta < 256) fail(ErrorCode::Parameter, "grid needs n_theta >= 256");
  int n_r = p.n_r;
  if (n_r <= 0) {
    if (p.rings_per_decade <= 0) fail(ErrorCode::Parameter, "rings per decade must be positive");
    n_r = static_cast<int>(std::ceil(p.rings_per_decade * std::log10(p.r_max / p.r_min)));
  }
  n_r = std::max(n_r, 1);
  PolarGrid g;
  g.n_theta = p.n_theta;
  g.r_edges = log_spaced(p.r_min, p.r_max, n_r + 1);
  for (int i = 0; i < n_r; ++i) g.r_centers.push_back(std::sqrt(g.r_edges[i] * g.r_edges[i + 1]));
  return g;
}

double PolarGrid::theta_center(int j) const { return (j + 0.5) * cell_angle(); }

Complex PolarGrid::center(int i, int j) const { return std::polar(r_centers[i], theta_center(j)); }

double PolarGrid::cell_angle() const { return 2.0 * pi / n_theta; }

std::vector<int> label_cells(const std::vector<std::uint8_t>& mask, int n_r, int n_theta,
                             ScanOrder order) {
  const std::size_t n = static_cast<std::size_t>(n_r) * n_theta;
  if (mask.size() != n) fail(ErrorCode::Parameter, "mask size does not match the grid");
  UnionFind uf(n);
  auto idx = [n_theta](int i, int j) { return static_cast<std::size_t>(i) * n_theta + j; };
  if (order == ScanOrder::Forward) {
    for (int i = 0; i < n_r; ++i)
      for (int j = 0; j < n_theta; ++j) {
        if (!mask[idx(i, j)]) continue;
        const int right = (j + 1) % n_theta;
        if (mask[idx(i, right)]) uf.unite(idx(i, j), idx(i, right));
        if (i + 1 < n_r && mask[idx(i + 1, j)]) uf.unite(idx(i, j), idx(i + 1, j));
      }
  } else {
    for (int i = n_r - 1; i >= 0; --i)
      for (int j = n_theta - 1; j >= 0; --j) {
        if (!mask[idx(i, j)]) continue;
        const int left = (j + n_theta - 1) % n_theta;
        if (mask[idx(i, left)]) uf.unite(idx(i, j), idx(i, left));
        if (i > 0 && mask[idx(i - 1, j)]) uf.unite(idx(i, j), idx(i - 1, j));
      }
  }
  std::vector<int> labels(n, 0);
  std::vector<int> root_label(n, 0);
  int next = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (!mask[c]) continue;
    const std::size_t root = uf.find(c);
    if (root_label[root] == 0) root_label[root] = ++next;
    labels[c] = root_label[root];
  }
  return labels;
}

TractDecomposition decompose(const FunctionSpec& spec, double R, const GridParams& params) {
  if (!(R > 0.0) || !std::isfinite(R)) fail(ErrorCode::Parameter, "threshold R must be positive");
  validate(spec);
  const double log_r = std::log(R);
  if (log_modulus(spec, 0.0).value >= log_r)
    fail(ErrorCode::Parameter, "threshold R must exceed |f(0)|");

  TractDecomposition dec;
  dec.grid = PolarGrid::make(params);
  dec.R = R;
  const PolarGrid& g = dec.grid;
  dec.log_modulus.assign(g.cells(), 0.0);
  detail::parallel_for(static_cast<std::size_t>(g.n_r()), params.threads, [&](std::size_t i) {
    for (int j = 0; j < g.n_theta; ++j)
      dec.log_modulus[g.index(int(i), j)] = log_modulus(spec, g.center(int(i), j)).value;
  });

  std::vector<std::uint8_t> mask(g.cells());
  for (std::size_t c = 0; c < mask.size(); ++c) mask[c] = dec.log_modulus[c] > log_r ? 1 : 0;
  dec.labels = label_cells(mask, g.n_r(), g.n_theta);

  int n_labels = 0;
  for (int l : dec.labels) n_labels = std::max(n_labels, l);
  dec.components.resize(n_labels);
  for (int k = 0; k < n_labels; ++k) dec.components[k].id = k + 1;
  for (int i = 0; i < g.n_r(); ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const int l = dec.labels[g.index(i, j)];
      if (l == 0) continue;
      ComponentInfo& c = dec.components[l - 1];
      ++c.cells;
      if (i == 0) c.touches_inner = true;
      if (i == g.n_r() - 1) c.touches_outer = true;
    }
  for (const ComponentInfo& c : dec.components)
    (c.touches_outer ? dec.tract_ids : dec.island_ids).push_back(c.id);
  if (n_labels == 0) dec.warnings.push_back("no cell exceeds R; R is too large for r_max");
  if (!dec.island_ids.empty())
    dec.warnings.push_back(std::to_string(dec.island_ids.size()) +
                           " bounded component(s) not counted as tracts");
  return dec;
}

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Theta: return "theta";
    case ProfileKind::ThetaStar: return "theta_star";
    case ProfileKind::Psi: return "psi";
    case ProfileKind::M: return "m";
    case ProfileKind::LogLogM: return "loglogM";
    case ProfileKind::TsujiIntegral: return "tsuji_integral";
  }
  return "unknown";
}

RadialProfile theta_profile(const TractDecomposition& dec, int component, bool star) {
  check_component(dec, component);
  const PolarGrid& g = dec.grid;
  RadialProfile p;
  p.kind = star ? ProfileKind::ThetaStar : ProfileKind::Theta;
  p.radii = g.r_centers;
  p.full_ring.assign(g.n_r(), 0);
  for (int i = 0; i < g.n_r(); ++i) {
    int count = 0;
    for (int j = 0; j < g.n_theta; ++j) count += dec.labels[g.index(i, j)] == component;
    p.values.push_back(count * g.cell_angle());
    if (star && count == g.n_theta) p.full_ring[i] = 1;
  }
  return p;
}

RadialProfile psi_profile(const TractDecomposition& dec, double beta, int component) {
  check_component(dec, component);
  check_beta(beta);
  const PolarGrid& g = dec.grid;
  RadialProfile p;
  p.kind = ProfileKind::Psi;
  p.radii = g.r_centers;
  p.full_ring.assign(g.n_r(), 0);
  for (int i = 0; i < g.n_r(); ++i) {
    const double level = std::pow(g.r_centers[i], beta);
    int count = 0;
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t c = g.index(i, j);
      count += dec.labels[c] == component && dec.log_modulus[c] >= level;
    }
    p.values.push_back(count * g.cell_angle());
  }
  return p;
}

RadialProfile psi_total(const TractDecomposition& dec, double beta) {
  check_beta(beta);
  const PolarGrid& g = dec.grid;
  RadialProfile p;
  p.kind = ProfileKind::Psi;
  p.radii = g.r_centers;
  p.full_ring.assign(g.n_r(), 0);
  for (int i = 0; i < g.n_r(); ++i) {
    const double level = std::pow(g.r_centers[i], beta);
    int count = 0;
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t c = g.index(i, j);
      count += is_tract(dec, dec.labels[c]) && dec.log_modulus[c] >= level;
    }
    p.values.push_back(count * g.cell_angle());
  }
  return p;
}

RadialProfile m_profile(const TractDecomposition& dec, double beta, int component) {
  check_component(dec, component);
  check_beta(beta);
  const PolarGrid& g = dec.grid;
  RadialProfile p;
  p.kind = ProfileKind::M;
  p.radii = g.r_centers;
  p.full_ring.assign(g.n_r(), 0);
  for (int i = 0; i < g.n_r(); ++i) {
    const double level = std::pow(g.r_centers[i], beta);
    double sum = 0.0;
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t c = g.index(i, j);
      if (dec.labels[c] != component) continue;
      const double v = dec.log_modulus[c] - level;
      if (v >= 0.0) sum += v * v;
    }
    p.values.push_back(sum / g.n_theta);
  }
  return p;
}

RadialProfile loglogm_profile(const FunctionSpec& spec, const std::vector<double>& radii, int samples) {
  RadialProfile p;
  p.kind = ProfileKind::LogLogM;
  p.radii = radii;
  p.values.assign(radii.size(), 0.0);
  p.full_ring.assign(radii.size(), 0);
  detail::parallel_for(radii.size(), 0,
                       [&](std::size_t k) { p.values[k] = max_modulus(spec, radii[k], samples); });
  return p;
}

TsujiResult tsuji_integral(const RadialProfile& profile, double r0, double kappa, double r) {
  if (!(kappa > 0.0 && kappa < 1.0)) fail(ErrorCode::Parameter, "kappa must lie in (0, 1)");
  if (!(r0 > 0.0 && r0 < kappa * r)) fail(ErrorCode::Parameter, "Tsuji integral needs 0 < r0 < kappa r");
  if (profile.radii.empty() || profile.radii.size() != profile.values.size())
    fail(ErrorCode::Parameter, "profile is empty or malformed");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u, g;
  TsujiResult out;
  const double a = std::log(r0), b = std::log(kappa * r);
  for (std::size_t k = 0; k < profile.radii.size(); ++k) {
    const bool full = !profile.full_ring.empty() && profile.full_ring[k];
    u.push_back(std::log(profile.radii[k]));
    if (full) {
      g.push_back(0.0);
      if (u.back() >= a && u.back() <= b) ++out.sentinel_rings;
    } else {
      g.push_back(profile.values[k] > 0.0 ? pi / profile.values[k] : inf);
    }
  }
  std::vector<double> xs{a}, ys{interpolate(u, g, a, out.extrapolated)};
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u[k] > a && u[k] < b) {
      xs.push_back(u[k]);
      ys.push_back(g[k]);
    }
  xs.push_back(b);
  ys.push_back(interpolate(u, g, b, out.extrapolated));
  double sum = 0.0;
  for (std::size_t k = 1; k < xs.size(); ++k) sum += 0.5 * (ys[k] + ys[k - 1]) * (xs[k] - xs[k - 1]);
  out.value = sum;
  out.infinite = std::isinf(sum);
  return out;
}

DcaReport verify_dca(const FunctionSpec& spec, int n_components, const std::vector<double>& radii,
                     double budget, int samples) {
  if (n_components < 1) fail(ErrorCode::Parameter, "DCA check needs at least one tract");
  if (radii.empty()) fail(ErrorCode::Parameter, "DCA check needs radii");
  DcaReport out;
  out.n = n_components;
  out.budget = budget;
  out.radii = radii;
  out.loglogm = loglogm_profile(spec, radii, samples).values;
  for (std::size_t k = 0; k < radii.size(); ++k)
    out.residual.push_back(out.loglogm[k] - 0.5 * n_components * std::log(radii[k]));
  out.min = *std::min_element(out.residual.begin(), out.residual.end());
  out.max = *std::max_element(out.residual.begin(), out.residual.end());
  out.bounded_below = out.min >= -budget;
  return out;
}

Theorem2Report verify_theorem2(const FunctionSpec& spec, const TractDecomposition& dec, double beta,
                               double r0, double kappa, const std::vector<double>& radii,
                               int component, double budget, int samples) {
  if (radii.empty()) fail(ErrorCode::Parameter, "Tsuji lower-bound check needs radii");
  if (component != 0) check_component(dec, component);
  Theorem2Report out;
  out.component = component;
  out.beta = beta;
  out.r0 = r0;
  out.kappa = kappa;
  out.budget = budget;
  out.radii = radii;

  RadialProfile psi = component == 0 ? psi_total(dec, beta) : psi_profile(dec, beta, component);
  // A ring lying entirely in U violates {|z| = r} not contained in U; it is
  // excluded by giving it zero weight in the integral.
  const PolarGrid& g = dec.grid;
  for (int i = 0; i < g.n_r(); ++i) {
    bool full = true;
    for (int j = 0; j < g.n_theta && full; ++j) {
      const int l = dec.labels[g.index(i, j)];
      full = component == 0 ? is_tract(dec, l) : l == component;
    }
    if (full) {
      psi.full_ring[i] = 1;
      out.excluded_rings.push_back(g.r_centers[i]);
    }
  }

  out.loglogm = loglogm_profile(spec, radii, samples).values;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const TsujiResult t = tsuji_integral(psi, r0, kappa, radii[k]);
    out.integral.push_back(t.value);
    out.residual.push_back(out.loglogm[k] - t.value);
  }
  out.inf = *std::min_element(out.residual.begin(), out.residual.end());
  out.final_ratio = out.integral.back() / out.loglogm.back();
  out.pass = out.inf > -budget;
  return out;
}

HypothesisReport theorem1_hypothesis(const FunctionSpec& spec, int n_components,
                                     const SchroederSolution& sol, const std::vector<double>& radii,
                                     int samples) {
  if (n_components < 1) fail(ErrorCode::Parameter, "hypothesis check needs at least one tract");
  if (radii.empty()) fail(ErrorCode::Parameter, "hypothesis check needs radii");
  for (double r : radii)
    if (!(r > sol.xi)) fail(ErrorCode::Parameter, "hypothesis radii must exceed the fixed point xi");
  HypothesisReport out;
  out.n = n_components;
  out.radii = radii;
  out.loglogm = loglogm_profile(spec, radii, samples).values;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double e = epsilon(sol, radii[k]);
    out.epsilon.push_back(e);
    out.margin.push_back((0.5 * n_components + e) * std::log(radii[k]) - out.loglogm[k]);
  }
  out.min_margin = *std::min_element(out.margin.begin(), out.margin.end());
  out.pass = out.min_margin >= 0.0;
  return out;
}

ConvexityReport convexity_check(const RadialProfile& m, double tol, double r_start) {
  if (m.radii.size() < 3 || m.radii.size() != m.values.size())
    fail(ErrorCode::Parameter, "convexity check needs at least 3 radii");
  ConvexityReport out;
  const double max_m = *std::max_element(m.values.begin(), m.values.end());
  out.threshold = tol * std::max(1.0, max_m);
  out.r_start = r_start;
  out.min_second_difference = std::numeric_limits<double>::infinity();
  out.pass = true;
  for (std::size_t k = 1; k + 1 < m.radii.size(); ++k) {
    const double u0 = std::log(m.radii[k - 1]), u1 = std::log(m.radii[k]), u2 = std::log(m.radii[k + 1]);
    const double left = (m.values[k] - m.values[k - 1]) / (u1 - u0);
    const double right = (m.values[k + 1] - m.values[k]) / (u2 - u1);
    const double d2 = 2.0 * (right - left) / (u2 - u0);
    out.radii.push_back(m.radii[k]);
    out.second_differences.push_back(d2);
    if (m.radii[k] < r_start) continue;
    out.min_second_difference = std::min(out.min_second_difference, d2);
    if (d2 < -out.threshold && out.pass) {
      out.pass = false;
      out.first_violation = m.radii[k];
    }
  }
  return out;
}

DeficiencyReport deficiency_integral(const RadialProfile& psi, double r0) {
  DeficiencyReport out;
  double sum = 0.0;
  double prev_u = 0.0, prev_g = 0.0;
  bool started = false;
  for (std::size_t k = 0; k < psi.radii.size(); ++k) {
    if (psi.radii[k] < r0) continue;
    const double u = std::log(psi.radii[k]);
    const double g = 2.0 * pi - psi.values[k];
    if (started) sum += 0.5 * (g + prev_g) * (u - prev_u);
    started = true;
    prev_u = u;
    prev_g = g;
    out.radii.push_back(psi.radii[k]);
    out.integral.push_back(sum);
    out.ratio.push_back(sum / u);
  }
  if (out.radii.size() >= 2) {
    const double top = out.radii.back() / 10.0;
    std::size_t first = 0;
    while (first + 1 < out.radii.size() && out.radii[first] < top) ++first;
    out.decreasing_top_decade = out.radii.front() <= top && out.ratio.back() < out.ratio[first];
  }
  return out;
}

AggregationReport cauchy_schwarz_check(const std::vector<RadialProfile>& psi_per_tract) {
  AggregationReport out;
  if (psi_per_tract.empty()) return out;
  const std::size_t rings = psi_per_tract.front().values.size();
  const double n = static_cast<double>(psi_per_tract.size());
  for (std::size_t i = 0; i < rings; ++i) {
    double inv = 0.0, total = 0.0;
    bool positive = true;
    for (const RadialProfile& p : psi_per_tract) {
      if (!(p.values[i] > 0.0)) positive = false;
      inv += 1.0 / p.values[i];
      total += p.values[i];
    }
    if (!positive) continue;
    ++out.rings_checked;
    if (inv < n * n / total * (1.0 - 1e-12)) ++out.violations;
  }
  return out;
}

}  // namespace tractlab
