#pragma once

// Mittag-Leffler function E_alpha for real 0 < alpha <= 2 and complex argument.
//
// Inside the switch radius the power series is summed where it does not cancel;
// elsewhere the Hankel-contour integral is used (alpha <= 1) or the duplication
// E_alpha(z) = (E_{alpha/2}(sqrt z) + E_{alpha/2}(-sqrt z)) / 2 (alpha > 1).
// Beyond the switch radius the asymptotic expansion
//
//   E_alpha(z) ~ rho * sum_m exp((z e^{2 pi i m})^rho) - sum_k z^-k / Gamma(1 - alpha k)
//
// is evaluated in log form, with m over |arg z + 2 pi m| < alpha pi and the
// algebraic tail truncated optimally.

#include "tractlab/fncat.hpp"

namespace tractlab {

enum class MlBranch { Series, Contour, Duplication, AsymptoticGrowth, AsymptoticDecay };

struct MlLog {
  Complex log;
  MlBranch branch = MlBranch::Series;
};

/// Series/asymptotic switch radius max(10, (30 / rho)^(1 / rho)), rho = 1 / alpha.
double ml_switch_radius(double alpha);

/// Sector half-width increment delta = min(alpha pi / 4, (1 - alpha / 2) pi / 2).
double ml_delta(double alpha);

/// True when |arg z| <= alpha pi / 2 + delta / 2.
bool ml_in_growth_sector(double alpha, Complex z);

MlLog ml_log(double alpha, Complex z);

/// Evaluator used for |z| <= switch radius, exposed for continuity checks.
MlLog ml_log_inside(double alpha, Complex z);

/// Asymptotic evaluator used beyond the switch radius.
MlLog ml_log_asymptotic(double alpha, Complex z);

/// E_alpha'(z) / E_alpha(z).
Complex ml_log_derivative(double alpha, Complex z);

Evaluation eval_mittag_leffler(double alpha, Complex z);

}  // namespace tractlab
