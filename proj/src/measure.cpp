#include "tractlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "parallel.hpp"
#include "tractlab/error.hpp"
#include "tractlab/logvar.hpp"

namespace tractlab {
namespace {

void check_region(const SquareRegion& region) {
  if (!(region.side > 0.0) || !std::isfinite(region.side))
    fail(ErrorCode::Parameter, "square side must be positive");
}

Complex cell_center(const SquareRegion& region, int resolution, std::size_t cell) {
  const int i = static_cast<int>(cell / resolution);  // row, bottom first
  const int j = static_cast<int>(cell % resolution);
  const double h = region.side / resolution;
  return region.center + Complex(-0.5 * region.side + (j + 0.5) * h, -0.5 * region.side + (i + 0.5) * h);
}

int tn_exit(const FunctionSpec& spec, double R, double beta, Complex z, int n_max) {
  const OrbitRecord orbit = iterate_T(spec, R, beta, z, n_max);
  return orbit.exit_index ? *orbit.exit_index : kNeverExit;
}

void fill_densities(EscapeGridReport& rep) {
  const std::size_t n = rep.cell_exit.size();
  std::vector<std::size_t> alive(rep.n_max + 1, 0);
  for (int e : rep.cell_exit) {
    const int last = e == kNeverExit ? rep.n_max : std::min(e - 1, rep.n_max);
    for (int k = 0; k <= last; ++k) ++alive[k];
  }
  rep.density_sequence.clear();
  rep.relative_to_T0.clear();
  for (int k = 0; k <= rep.n_max; ++k) {
    rep.density_sequence.push_back(n == 0 ? 0.0 : double(alive[k]) / double(n));
    rep.relative_to_T0.push_back(alive[0] == 0 ? 0.0 : double(alive[k]) / double(alive[0]));
  }
}

int z_plane_exit(const FunctionSpec& spec, Complex w, int n_max, double escape_radius) {
  bool above = false;
  for (int k = 0;; ++k) {
    if (!above && std::abs(w) >= escape_radius) above = true;
    if (k == n_max) break;
    Evaluation next;
    try {
      next = eval(spec, w);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Overflow) throw;
      return kNeverExit;
    }
    if (next.overflow) return kNeverExit;
    if (above && std::abs(next.value) < std::abs(w)) return k + 1;
    w = next.value;
  }
  return above ? kNeverExit : 0;
}

}  // namespace

SquareRegion q_square(Complex z) {
  if (!(z.real() > 0.0)) fail(ErrorCode::Parameter, "Q(z) needs Re z > 0");
  return {z, z.real()};
}

EscapeGridReport tn_density(const FunctionSpec& spec, double R, double beta, const SquareRegion& region,
                            int resolution, int n_max, const GridOptions& options) {
  check_region(region);
  if (resolution < 64) fail(ErrorCode::Parameter, "resolution must be at least 64");
  if (n_max < 0) fail(ErrorCode::Parameter, "n_max must be nonnegative");
  validate(spec);
  EscapeGridReport rep;
  rep.kind = EscapeKind::LogCoordinates;
  rep.region = region;
  rep.resolution = resolution;
  rep.n_max = n_max;
  const std::size_t cells = static_cast<std::size_t>(resolution) * resolution;
  rep.cell_exit.assign(cells, 0);
  detail::parallel_for(cells, options.threads, [&](std::size_t c) {
    rep.cell_exit[c] = tn_exit(spec, R, beta, cell_center(region, resolution, c), n_max);
  });
  fill_densities(rep);
  return rep;
}

EscapeGridReport tn_density_monte_carlo(const FunctionSpec& spec, double R, double beta,
                                        const SquareRegion& region, int samples, int n_max,
                                        std::uint64_t seed, const GridOptions& options) {
  check_region(region);
  if (samples < 1) fail(ErrorCode::Parameter, "sample count must be positive");
  validate(spec);
  EscapeGridReport rep;
  rep.kind = EscapeKind::LogCoordinates;
  rep.region = region;
  rep.resolution = 0;
  rep.n_max = n_max;
  rep.mode = "monte_carlo";
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < samples; ++k) {
    const double x = u(rng), y = u(rng);
    rep.points.push_back(region.center + region.side * Complex(x, y));
  }
  rep.cell_exit.assign(rep.points.size(), 0);
  detail::parallel_for(rep.points.size(), options.threads, [&](std::size_t c) {
    rep.cell_exit[c] = tn_exit(spec, R, beta, rep.points[c], n_max);
  });
  fill_densities(rep);
  return rep;
}

EscapeGridReport z_plane_escape_density(const FunctionSpec& spec, const SquareRegion& region,
                                        int resolution, int n_max, double escape_radius,
                                        const GridOptions& options) {
  check_region(region);
  if (resolution < 1) fail(ErrorCode::Parameter, "resolution must be positive");
  if (n_max < 5) fail(ErrorCode::Parameter, "n_max must be at least 5");
  if (!(escape_radius > 0.0)) fail(ErrorCode::Parameter, "escape radius must be positive");
  validate(spec);
  EscapeGridReport rep;
  rep.kind = EscapeKind::ZPlane;
  rep.region = region;
  rep.resolution = resolution;
  rep.n_max = n_max;
  const std::size_t cells = static_cast<std::size_t>(resolution) * resolution;
  rep.cell_exit.assign(cells, 0);
  detail::parallel_for(cells, options.threads, [&](std::size_t c) {
    rep.cell_exit[c] = z_plane_exit(spec, cell_center(region, resolution, c), n_max, escape_radius);
  });
  fill_densities(rep);
  return rep;
}

double s_square_density(const FunctionSpec& spec, double R, double beta, Complex z, int resolution,
                        const GridOptions& options) {
  if (!(z.real() > 2.0 * std::log(R))) fail(ErrorCode::Parameter, "s_square_density needs Re z > 2 log R");
  if (resolution < 1) fail(ErrorCode::Parameter, "resolution must be positive");
  const SquareRegion region = q_square(z);
  const std::size_t cells = static_cast<std::size_t>(resolution) * resolution;
  std::vector<std::uint8_t> outside(cells, 0);
  detail::parallel_for(cells, options.threads, [&](std::size_t c) {
    LogCoordinateState s;
    try {
      s = try_lift(spec, R, cell_center(region, resolution, c));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Overflow) throw;
      return;  // |f| beyond the floating range: inside L
    }
    outside[c] = in_L(beta, s) ? 0 : 1;
  });
  std::size_t count = 0;
  for (auto o : outside) count += o;
  return double(count) / double(cells);
}

RefinementReport refinement_study(const std::vector<EscapeGridReport>& chain, RefinementMode mode,
                                  double tolerance) {
  if (chain.size() < 2) fail(ErrorCode::Parameter, "refinement study needs at least two reports");
  const EscapeGridReport& first = chain.front();
  for (const EscapeGridReport& r : chain) {
    if (r.region.center != first.region.center || r.region.side != first.region.side ||
        r.kind != first.kind)
      fail(ErrorCode::Parameter, "refinement chain mixes different regions");
    if (r.density_sequence.empty()) fail(ErrorCode::Parameter, "report has no density sequence");
  }
  RefinementReport out;
  out.mode = mode;
  out.tolerance = tolerance;
  for (const EscapeGridReport& r : chain) {
    out.resolutions.push_back(r.resolution);
    out.tails.push_back(r.density_sequence.back());
    const auto& d = r.density_sequence;
    const bool all_zero = std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; });
    out.shrinking.push_back(density_nonincreasing(r) && (all_zero || d.back() < d.front()));
  }
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const double a = out.tails[k - 1], b = out.tails[k];
    out.relative_changes.push_back(a == b ? 0.0 : std::abs(b - a) / std::max(std::abs(a), 1e-300));
  }
  if (mode == RefinementMode::Positive) {
    out.pass = std::all_of(out.relative_changes.begin(), out.relative_changes.end(),
                           [&](double c) { return c <= tolerance; }) &&
               std::all_of(out.tails.begin(), out.tails.end(), [](double t) { return t > 0.0; });
  } else {
    out.pass = std::all_of(out.shrinking.begin(), out.shrinking.end(), [](auto s) { return s != 0; });
  }
  return out;
}

std::vector<std::uint8_t> exit_raster(const EscapeGridReport& report) {
  std::vector<std::uint8_t> out;
  out.reserve(report.cell_exit.size());
  for (int e : report.cell_exit) out.push_back(e == kNeverExit ? 0 : static_cast<std::uint8_t>(std::min(e, 255)));
  return out;
}

bool density_nonincreasing(const EscapeGridReport& report) {
  const auto& d = report.density_sequence;
  for (std::size_t k = 1; k < d.size(); ++k)
    if (d[k] > d[k - 1]) return false;
  return std::all_of(d.begin(), d.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
}

}  // namespace tractlab
