#pragma once

// Linearizer of E_beta(x) = exp(beta x) at its repelling fixed point xi > e:
// Phi(E_beta(x)) = mu Phi(x), Phi(xi) = 0, Phi'(xi) = 1, mu = beta xi.

#include <vector>

namespace tractlab {

struct SchroederSolution {
  double beta = 0.0;
  double xi = 0.0;
  double mu = 0.0;
  int koenigs_depth = 200;
  double tol = 1e-12;
};

/// Bisection for exp(beta x) = x on [e, x_hi]. Requires 0 < beta < 1/e.
SchroederSolution fixed_point(double beta, double tol = 1e-12, int koenigs_depth = 200);

/// Koenigs limit Phi(x) = lim mu^n (L^n(x) - xi) with L(y) = log(y) / beta.
double phi(const SchroederSolution& sol, double x);

/// Phi(x) given only log x, for x beyond the floating range.
double phi_from_log(const SchroederSolution& sol, double log_x);

/// epsilon(x) = 1 / Phi(x), for x > xi.
double epsilon(const SchroederSolution& sol, double x);
double epsilon_from_log(const SchroederSolution& sol, double log_x);

/// Phi(E_beta^k(x0) + a), evaluated without forming the k-th iterate.
double phi_orbit(const SchroederSolution& sol, int k, double x0, double a = 0.0);

struct DeltaSequence {
  std::vector<double> delta;  // delta(x_n) = epsilon(exp(x_n)), x_n = E_beta^n(x0)
  std::vector<double> bound;  // 1 / (mu^(n+1) Phi(x0))
  bool truncated = false;     // stopped early because a term left the floating range
};

/// delta(x_n) for n = 0..n_max. Requires x0 > xi.
DeltaSequence delta_sequence(const SchroederSolution& sol, double x0, int n_max);

/// Partial products prod_{k=1}^{n} (1 - eta delta_k) for n = 1..delta.size()-1.
std::vector<double> partial_products(const std::vector<double>& delta, double eta);

}  // namespace tractlab
