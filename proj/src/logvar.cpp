#include "tractlab/logvar.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "logsum.hpp"
#include "tractlab/error.hpp"

namespace tractlab {
namespace {

using std::numbers::pi;

constexpr double kOverflowRe = 700.0;

long branch_of(double im) {
  return std::lround((im - detail::wrap_angle(im)) / (2.0 * pi));
}

}  // namespace

Complex F_derivative(const FunctionSpec& spec, Complex z) {
  const Complex w = std::exp(z);
  return w * log_derivative(spec, w);
}

LogCoordinateState lift(const FunctionSpec& spec, double R, Complex z, const LogCoordinateState* previous) {
  if (!(R > 0.0)) fail(ErrorCode::Parameter, "threshold R must be positive");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail(ErrorCode::Parameter, "point must be finite");
  if (z.real() > kOverflowRe) fail(ErrorCode::Overflow, "e^z exceeds the floating range");
  const Complex w = std::exp(z);

  LogCoordinateState s;
  s.z = z;
  Complex predicted;
  if (previous != nullptr) {
    predicted = previous->F + F_derivative(spec, previous->z) * (z - previous->z);
    if (std::abs(predicted.imag() - previous->F.imag()) > pi)
      fail(ErrorCode::Continuation, "phase step exceeds pi; refine the path");
  }
  if (const auto* e = std::get_if<ExpFamily>(&spec)) {
    s.F = std::log(e->lambda) + w;
  } else {
    const Complex l = log_eval(spec, w).log;
    s.F = Complex(l.real(), detail::wrap_angle(l.imag()));
    if (previous != nullptr) {
      const double k = std::round((predicted.imag() - s.F.imag()) / (2.0 * pi));
      s.F += Complex(0.0, 2.0 * pi * k);
    }
  }
  if (!(s.F.real() > std::log(R))) fail(ErrorCode::Domain, "point is not in W");
  s.branch_offset = branch_of(s.F.imag());
  s.in_W = true;
  return s;
}

LogCoordinateState try_lift(const FunctionSpec& spec, double R, Complex z) {
  try {
    return lift(spec, R, z);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Domain) throw;
    LogCoordinateState s;
    s.z = z;
    s.F = log_eval(spec, std::exp(z)).log;
    s.in_W = false;
    return s;
  }
}

std::vector<LogCoordinateState> lift_path(const FunctionSpec& spec, double R,
                                          const std::vector<Complex>& path) {
  std::vector<LogCoordinateState> out;
  out.reserve(path.size());
  for (const Complex& z : path) out.push_back(lift(spec, R, z, out.empty() ? nullptr : &out.back()));
  return out;
}

std::vector<Complex> tract_base_points(const TractDecomposition& dec) {
  const PolarGrid& g = dec.grid;
  const int outer = g.n_r() - 1;
  std::vector<Complex> out;
  for (int id : dec.tract_ids) {
    int best = -1;
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t c = g.index(outer, j);
      if (dec.labels[c] != id) continue;
      if (best < 0 || dec.log_modulus[c] > dec.log_modulus[g.index(outer, best)]) best = j;
    }
    out.emplace_back(std::log(g.r_centers[outer]), g.theta_center(best));
  }
  return out;
}

std::vector<LiftedCell> lift_tract(const FunctionSpec& spec, const TractDecomposition& dec, int tract_id) {
  const PolarGrid& g = dec.grid;
  int slot = -1;
  for (std::size_t k = 0; k < dec.tract_ids.size(); ++k)
    if (dec.tract_ids[k] == tract_id) slot = static_cast<int>(k);
  if (slot < 0) fail(ErrorCode::Parameter, "no tract with id " + std::to_string(tract_id));

  const Complex base = tract_base_points(dec)[slot];
  const int outer = g.n_r() - 1;
  const int base_j = static_cast<int>(std::lround(base.imag() / g.cell_angle() - 0.5));

  std::vector<std::uint8_t> seen(g.cells(), 0);
  std::vector<LiftedCell> out;
  std::deque<std::size_t> queue;  // indices into out
  out.push_back({g.index(outer, base_j), lift(spec, dec.R, base)});
  seen[out.back().cell] = 1;
  queue.push_back(0);
  while (!queue.empty()) {
    const LiftedCell current = out[queue.front()];
    queue.pop_front();
    const int i = static_cast<int>(current.cell / g.n_theta);
    const int j = static_cast<int>(current.cell % g.n_theta);
    const struct { int di, dj; } steps[4] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}};
    for (const auto& st : steps) {
      const int ni = i + st.di;
      if (ni < 0 || ni >= g.n_r()) continue;
      const int nj = (j + st.dj + g.n_theta) % g.n_theta;
      const std::size_t nc = g.index(ni, nj);
      if (seen[nc] || dec.labels[nc] != tract_id) continue;
      seen[nc] = 1;
      Complex z = current.state.z;
      if (st.dj != 0) z += Complex(0.0, st.dj * g.cell_angle());
      else z += std::log(g.r_centers[ni] / g.r_centers[i]);
      out.push_back({nc, lift(spec, dec.R, z, &current.state)});
      queue.push_back(out.size() - 1);
    }
  }
  return out;
}

bool in_L(double beta, const LogCoordinateState& state) {
  if (!state.in_W) return false;
  const double x = beta * state.z.real();
  if (x < kOverflowRe) return state.F.real() >= std::exp(x);
  return state.F.real() > 0.0 && std::log(state.F.real()) >= x;
}

OrbitRecord iterate_T(const FunctionSpec& spec, double R, double beta, Complex z, int n_max) {
  if (n_max < 0) fail(ErrorCode::Parameter, "n_max must be nonnegative");
  if (!(beta > 0.0)) fail(ErrorCode::Parameter, "beta must be positive");
  OrbitRecord rec;
  double tower = z.real();  // E_beta^k(Re z)
  for (int k = 0;; ++k) {
    LogCoordinateState s;
    try {
      s = try_lift(spec, R, z);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Overflow) throw;
      rec.certified_by_overflow = true;
      break;
    }
    rec.states.push_back(s);
    if (z.real() < tower) rec.lower_bound_held = false;
    if (!in_L(beta, s)) {
      rec.exit_index = k;
      break;
    }
    if (k == n_max) break;
    if (s.F.real() > kOverflowRe) {
      rec.certified_by_overflow = true;
      break;
    }
    tower = std::exp(beta * tower);
    z = s.F;
  }
  rec.escape_flag = !rec.exit_index.has_value();
  return rec;
}

ExpansionReport check_expansion(const FunctionSpec& spec, double R, const std::vector<Complex>& samples,
                                double margin) {
  ExpansionReport out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  const double log_r = std::log(R);
  for (const Complex& z : samples) {
    const LogCoordinateState s = try_lift(spec, R, z);
    if (!s.in_W || s.F.real() < log_r + margin) {
      ++out.skipped;
      continue;
    }
    ++out.checked;
    const double slope = std::abs(F_derivative(spec, z));
    const double bound = (s.F.real() - log_r) / (4.0 * pi);
    if (slope < bound) ++out.violations;
    if (bound > 0.0) out.min_ratio = std::min(out.min_ratio, slope / bound);
  }
  return out;
}

std::vector<Complex> sample_W(const FunctionSpec& spec, double R, double margin, const SampleBox& box,
                              int count, std::uint64_t seed, int max_tries) {
  if (!(box.re_max > box.re_min && box.im_max > box.im_min))
    fail(ErrorCode::Parameter, "sample box is empty");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(box.re_min, box.re_max), im(box.im_min, box.im_max);
  const double level = std::log(R) + margin;
  std::vector<Complex> out;
  for (int tries = 0; static_cast<int>(out.size()) < count; ++tries) {
    if (tries >= max_tries) fail(ErrorCode::Domain, "W is too sparse in the sample box");
    const Complex z(re(rng), im(rng));
    if (log_modulus(spec, std::exp(z)).value >= level) out.push_back(z);
  }
  return out;
}

void write_orbit_csv(std::ostream& out, const OrbitRecord& orbit, double beta) {
  out << "n,re_z,im_z,re_F,im_F,in_L,exit,escape\n";
  char line[256];
  for (std::size_t k = 0; k < orbit.states.size(); ++k) {
    const LogCoordinateState& s = orbit.states[k];
    const bool exited = orbit.exit_index && *orbit.exit_index == static_cast<int>(k);
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%d,%d,%d\n", k, s.z.real(), s.z.imag(),
                  s.F.real(), s.F.imag(), in_L(beta, s) ? 1 : 0, exited ? 1 : 0,
                  orbit.escape_flag ? 1 : 0);
    out << line;
  }
}

}  // namespace tractlab
