#include "tractlab/schroeder.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tractlab/error.hpp"

namespace tractlab {
namespace {

constexpr double kLarge = 1e300;

void check_solution(const SchroederSolution& sol) {
  if (!(sol.beta > 0.0 && sol.beta < 1.0 / std::numbers::e) || !(sol.mu > 1.0))
    fail(ErrorCode::Parameter, "invalid Schroeder solution");
}

// Continues the Koenigs iteration from a deviation h = L^n(x) - xi already
// multiplied by mu^n into `scaled`. Each inverse step maps h to log1p(h / xi) / beta,
// which follows from log(xi) / beta = xi and avoids cancellation near xi.
double koenigs(const SchroederSolution& sol, double h, double scale, int start) {
  double value = scale * h;
  for (int n = start; n < sol.koenigs_depth; ++n) {
    h = std::log1p(h / sol.xi) / sol.beta;
    scale *= sol.mu;
    const double next = scale * h;
    const bool done = std::abs(next - value) <= sol.tol * std::abs(next);
    value = next;
    if (done || h == 0.0) break;
  }
  return value;
}

}  // namespace

SchroederSolution fixed_point(double beta, double tol, int koenigs_depth) {
  if (!(beta > 0.0 && beta < 1.0 / std::numbers::e))
    fail(ErrorCode::Parameter, "beta must lie in (0, 1/e) for a repelling fixed point to exist");
  if (!(tol > 0.0) || koenigs_depth < 1)
    fail(ErrorCode::Parameter, "tolerance and Koenigs depth must be positive");
  auto g = [beta](double x) { return std::exp(beta * x) - x; };
  double lo = std::numbers::e;
  double hi = 10.0;
  while (g(hi) <= 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) fail(ErrorCode::Internal, "fixed point bracket diverged");
  }
  for (int step = 0; step < 200; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  const double xi = std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
  return {beta, xi, beta * xi, koenigs_depth, tol};
}

double phi(const SchroederSolution& sol, double x) {
  check_solution(sol);
  if (std::isnan(x) || x < sol.xi) fail(ErrorCode::Domain, "Phi is defined on [xi, inf)");
  if (x == sol.xi) return 0.0;
  if (!std::isfinite(x)) fail(ErrorCode::Overflow, "Phi needs a finite argument; use phi_from_log");
  return koenigs(sol, x - sol.xi, 1.0, 0);
}

double phi_from_log(const SchroederSolution& sol, double log_x) {
  check_solution(sol);
  if (std::isnan(log_x) || log_x < std::log(sol.xi)) fail(ErrorCode::Domain, "Phi is defined on [xi, inf)");
  if (!std::isfinite(log_x)) fail(ErrorCode::Overflow, "log x must be finite");
  return koenigs(sol, log_x / sol.beta - sol.xi, sol.mu, 1);
}

double epsilon(const SchroederSolution& sol, double x) {
  if (!(x > sol.xi)) fail(ErrorCode::Domain, "epsilon is defined for x > xi");
  return 1.0 / phi(sol, x);
}

double epsilon_from_log(const SchroederSolution& sol, double log_x) {
  if (!(log_x > std::log(sol.xi))) fail(ErrorCode::Domain, "epsilon is defined for x > xi");
  return 1.0 / phi_from_log(sol, log_x);
}

double phi_orbit(const SchroederSolution& sol, int k, double x0, double a) {
  check_solution(sol);
  if (k < 0) fail(ErrorCode::Parameter, "orbit index must be nonnegative");
  // Forward iterates while they stay representable.
  std::vector<double> y{x0};
  while (static_cast<int>(y.size()) <= k) {
    const double next = std::exp(sol.beta * y.back());
    if (!(next <= kLarge)) break;
    y.push_back(next);
  }
  const int last = static_cast<int>(y.size()) - 1;
  // L(y_j + a) = y_{j-1} + log1p(a exp(-beta y_{j-1})) / beta
  int level = k;
  double scale = 1.0;
  while (level > 0 && (level > last || y[level] + a > kLarge)) {
    const double prev = level - 1 <= last ? y[level - 1] : std::numeric_limits<double>::infinity();
    a = std::log1p(a * std::exp(-sol.beta * prev)) / sol.beta;
    scale *= sol.mu;
    --level;
  }
  return scale * phi(sol, y[level] + a);
}

DeltaSequence delta_sequence(const SchroederSolution& sol, double x0, int n_max) {
  check_solution(sol);
  if (!(x0 > sol.xi)) fail(ErrorCode::Domain, "delta sequence needs x0 > xi");
  if (n_max < 0) fail(ErrorCode::Parameter, "n_max must be nonnegative");
  DeltaSequence out;
  const double phi0 = phi(sol, x0);
  // Phi(exp(x_n)) = mu^2 Phi(x_{n-1} - log(beta) / beta) for n >= 1.
  const double shift = -std::log(sol.beta) / sol.beta;
  double bound = 1.0 / (sol.mu * phi0);
  for (int n = 0; n <= n_max; ++n) {
    const double p = n == 0 ? phi_from_log(sol, x0)
                            : sol.mu * sol.mu * phi_orbit(sol, n - 1, x0, shift);
    const double d = 1.0 / p;
    if (!std::isfinite(p) || d == 0.0 || bound == 0.0) {
      out.truncated = true;
      break;
    }
    out.delta.push_back(d);
    out.bound.push_back(bound);
    bound /= sol.mu;
  }
  return out;
}

std::vector<double> partial_products(const std::vector<double>& delta, double eta) {
  std::vector<double> out;
  double product = 1.0;
  for (std::size_t k = 1; k < delta.size(); ++k) {
    product *= 1.0 - eta * delta[k];
    out.push_back(product);
  }
  return out;
}

}  // namespace tractlab
