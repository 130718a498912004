#include "tractlab/mittag_leffler.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "logsum.hpp"
#include "tractlab/error.hpp"

namespace tractlab {
namespace {

using detail::kNegInf;
using detail::log_add;
using detail::log_sum_exp;
using std::numbers::pi;

constexpr double kSeriesMaxExponent = 50.0;  // largest |z|^rho summed by the series
constexpr double kSeriesMaxLoss = 9.0;       // tolerated cancellation, in nats
constexpr double kTailDrop = 41.0;           // terms below dominant - kTailDrop are negligible
constexpr std::size_t kMaxSeriesTerms = 200000;
constexpr std::size_t kMaxAsymptoticTerms = 4000;

double lgamma_safe(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

// Per-alpha tables: lgamma(alpha n + 1) for the power series, and
// 1/Gamma(1 - alpha k) = sin(pi alpha k) Gamma(alpha k) / pi for the
// algebraic tail of the asymptotic expansion, stored as log-magnitude + sign.
struct Tables {
  double alpha = 0.0;
  std::vector<double> series_lgamma;
  std::vector<double> tail_logmag;  // index k - 1
  std::vector<int> tail_sign;       // 0 when alpha k is an integer

  double series(std::size_t n) {
    while (series_lgamma.size() <= n)
      series_lgamma.push_back(lgamma_safe(alpha * static_cast<double>(series_lgamma.size()) + 1.0));
    return series_lgamma[n];
  }

  void ensure_tail(std::size_t k) {
    while (tail_logmag.size() < k) {
      const double ak = alpha * static_cast<double>(tail_logmag.size() + 1);
      const double nearest = std::round(ak);
      double s = 0.0;
      if (std::abs(ak - nearest) > 1e-9 * std::max(1.0, ak)) s = std::sin(pi * std::fmod(ak, 2.0));
      if (s == 0.0) {
        tail_logmag.push_back(kNegInf);
        tail_sign.push_back(0);
      } else {
        tail_logmag.push_back(std::log(std::abs(s)) + lgamma_safe(ak) - std::log(pi));
        tail_sign.push_back(s > 0 ? 1 : -1);
      }
    }
  }
};

Tables& tables_for(double alpha) {
  thread_local std::vector<Tables> cache;
  for (auto& t : cache)
    if (t.alpha == alpha) return t;
  if (cache.size() >= 16) cache.erase(cache.begin());
  cache.push_back(Tables{alpha, {}, {}, {}});
  return cache.back();
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    fail(ErrorCode::Parameter, "Mittag-Leffler alpha must lie in (0, 2]");
}

void check_finite(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail(ErrorCode::Parameter, "argument must be finite");
}

struct SeriesResult {
  Complex log;
  double loss;  // log of the largest term minus log|sum|
};

SeriesResult series_log(double alpha, Complex z) {
  Tables& tab = tables_for(alpha);
  const double log_r = std::log(std::abs(z));
  const Complex unit = z / std::abs(z);
  std::vector<double> exponents;
  double peak = kNegInf;
  for (std::size_t n = 0;; ++n) {
    if (n >= kMaxSeriesTerms) fail(ErrorCode::Internal, "Mittag-Leffler series did not converge");
    const double e = static_cast<double>(n) * log_r - tab.series(n);
    exponents.push_back(e);
    peak = std::max(peak, e);
    // Past the peak the exponents are concave in n, so the tail is geometric.
    if (n > 2 && e < peak - kTailDrop && e < exponents[n - 1]) break;
  }
  // Powers of the unit phase by repeated multiplication stay exact on the real axis.
  Complex sum = 0.0;
  Complex power = 1.0;
  for (std::size_t n = 0; n < exponents.size(); ++n) {
    sum += std::exp(exponents[n] - peak) * power;
    power *= unit;
  }
  if (sum == Complex(0.0, 0.0)) return {{kNegInf, 0.0}, std::numeric_limits<double>::infinity()};
  const Complex log = peak + std::log(sum);
  return {log, peak - log.real()};
}

// E_alpha(z) for 0 < alpha <= 1 as an integral over two rays arg = +-mu in the
// zeta = t^alpha plane, plus the residue exp(z^rho)/alpha when z lies between them.
Complex contour_log(double alpha, Complex z) {
  const double rho = 1.0 / alpha;
  const double r = std::abs(z);
  const double arg_abs = std::abs(std::arg(z));
  const double mu_a = 0.65 * alpha * pi;
  const double mu_b = alpha * pi;
  const double mu = std::abs(arg_abs - mu_a) >= std::abs(arg_abs - mu_b) ? mu_a : mu_b;
  const double c = -std::cos(mu / alpha);
  const double upper = std::pow(45.0 / c, alpha);

  const Complex up = std::polar(1.0, mu);
  const Complex down = std::polar(1.0, -mu);
  const Complex rot_up = std::polar(1.0, mu / alpha);
  const Complex rot_down = std::polar(1.0, -mu / alpha);
  auto integrand = [&](double chi) -> Complex {
    const double s = std::pow(chi, rho);
    return std::exp(s * rot_up) * up / (chi * up - z) -
           std::exp(s * rot_down) * down / (chi * down - z);
  };

  using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
  Complex integral = 0.0;
  if (r > 0.0 && r < upper) {
    integral = Quad::integrate(integrand, 0.0, r, 12, 1e-12) +
               Quad::integrate(integrand, r, upper, 12, 1e-12);
  } else {
    integral = Quad::integrate(integrand, 0.0, upper, 12, 1e-12);
  }
  integral /= Complex(0.0, 2.0 * pi * alpha);

  Complex result = detail::safe_log(integral);
  if (arg_abs < mu) result = log_add(std::exp(rho * std::log(z)) - std::log(alpha), result);
  return result;
}

}  // namespace

double ml_switch_radius(double alpha) {
  return std::max(10.0, std::pow(30.0 * alpha, alpha));
}

double ml_delta(double alpha) {
  return std::min(alpha * pi / 4.0, (1.0 - alpha / 2.0) * pi / 2.0);
}

bool ml_in_growth_sector(double alpha, Complex z) {
  return std::abs(std::arg(z)) <= alpha * pi / 2.0 + ml_delta(alpha) / 2.0;
}

MlLog ml_log_inside(double alpha, Complex z) {
  check_alpha(alpha);
  check_finite(z);
  if (z == Complex(0.0, 0.0)) return {{0.0, 0.0}, MlBranch::Series};
  const double a = std::pow(std::abs(z), 1.0 / alpha);
  if (a <= kSeriesMaxExponent) {
    const SeriesResult s = series_log(alpha, z);
    if (s.loss <= kSeriesMaxLoss) return {s.log, MlBranch::Series};
  }
  if (alpha <= 1.0) return {contour_log(alpha, z), MlBranch::Contour};

  const Complex w = std::sqrt(z);
  const MlLog plus = ml_log(alpha / 2.0, w);
  const MlLog minus = ml_log(alpha / 2.0, -w);
  return {log_add(plus.log, minus.log) - std::log(2.0), MlBranch::Duplication};
}

MlLog ml_log_asymptotic(double alpha, Complex z) {
  check_alpha(alpha);
  check_finite(z);
  if (z == Complex(0.0, 0.0)) fail(ErrorCode::Domain, "asymptotic expansion needs z != 0");
  const double rho = 1.0 / alpha;
  const double r = std::abs(z);
  const double log_r = std::log(r);
  const double arg = std::arg(z);
  const Complex log_z = std::log(z);

  std::vector<Complex> logs;
  double dominant = kNegInf;
  const double a = std::exp(rho * log_r);
  if (!std::isfinite(a)) fail(ErrorCode::Overflow, "|z|^rho exceeds the floating range");
  for (int m = -1; m <= 1; ++m) {
    const double theta = arg + 2.0 * pi * m;
    if (std::abs(theta) >= alpha * pi) continue;
    const Complex zeta = std::polar(a, rho * theta);
    logs.push_back(zeta + std::log(rho));
    dominant = std::max(dominant, zeta.real());
  }

  Tables& tab = tables_for(alpha);
  const double log_pi = std::log(pi);
  double previous = std::numeric_limits<double>::infinity();
  double floor = kNegInf;
  for (std::size_t k = 1; k <= kMaxAsymptoticTerms; ++k) {
    const double envelope = lgamma_safe(alpha * static_cast<double>(k)) - log_pi -
                            static_cast<double>(k) * log_r;
    if (k == 1) floor = std::max(dominant, envelope) - kTailDrop;
    if (envelope > previous || envelope < floor) break;
    previous = envelope;
    tab.ensure_tail(k);
    const int sign = tab.tail_sign[k - 1];
    if (sign == 0) continue;
    Complex term = tab.tail_logmag[k - 1] - static_cast<double>(k) * log_z;
    if (sign > 0) term += Complex(0.0, pi);
    logs.push_back(term);
  }

  const MlBranch branch =
      ml_in_growth_sector(alpha, z) ? MlBranch::AsymptoticGrowth : MlBranch::AsymptoticDecay;
  return {log_sum_exp(logs), branch};
}

MlLog ml_log(double alpha, Complex z) {
  check_alpha(alpha);
  check_finite(z);
  if (std::abs(z) <= ml_switch_radius(alpha)) return ml_log_inside(alpha, z);
  return ml_log_asymptotic(alpha, z);
}

Complex ml_log_derivative(double alpha, Complex z) {
  check_alpha(alpha);
  check_finite(z);
  if (std::abs(z) <= ml_switch_radius(alpha)) {
    // Five-point stencil on log E, each sample unwrapped against the centre.
    const double h = 1e-3 * (1.0 + std::abs(z));
    const Complex centre = ml_log_inside(alpha, z).log;
    auto rel = [&](double k) {
      const Complex d = ml_log_inside(alpha, z + k * h).log - centre;
      return Complex(d.real(), detail::wrap_angle(d.imag()));
    };
    return (8.0 * (rel(1) - rel(-1)) - (rel(2) - rel(-2))) / (12.0 * h);
  }

  const double rho = 1.0 / alpha;
  const double r = std::abs(z);
  const double log_r = std::log(r);
  const double arg = std::arg(z);
  const Complex log_z = std::log(z);
  const double a = std::exp(rho * log_r);

  std::vector<Complex> value_logs;
  std::vector<Complex> slope_logs;
  double dominant = kNegInf;
  for (int m = -1; m <= 1; ++m) {
    const double theta = arg + 2.0 * pi * m;
    if (std::abs(theta) >= alpha * pi) continue;
    const Complex zeta = std::polar(a, rho * theta);
    value_logs.push_back(zeta + std::log(rho));
    // d/dz exp(zeta) = exp(zeta) rho zeta / z
    slope_logs.push_back(zeta + 2.0 * std::log(rho) + std::log(zeta) - log_z);
    dominant = std::max(dominant, zeta.real());
  }
  Tables& tab = tables_for(alpha);
  const double log_pi = std::log(pi);
  double previous = std::numeric_limits<double>::infinity();
  double floor = kNegInf;
  for (std::size_t k = 1; k <= kMaxAsymptoticTerms; ++k) {
    const double envelope = lgamma_safe(alpha * static_cast<double>(k)) - log_pi -
                            static_cast<double>(k) * log_r;
    if (k == 1) floor = std::max(dominant, envelope) - kTailDrop;
    if (envelope > previous || envelope < floor) break;
    previous = envelope;
    tab.ensure_tail(k);
    const int sign = tab.tail_sign[k - 1];
    if (sign == 0) continue;
    const double kd = static_cast<double>(k);
    // -g_k z^-k has derivative k g_k z^(-k-1)
    Complex value = tab.tail_logmag[k - 1] - kd * log_z;
    if (sign > 0) value += Complex(0.0, pi);
    Complex slope = tab.tail_logmag[k - 1] + std::log(kd) - (kd + 1.0) * log_z;
    if (sign < 0) slope += Complex(0.0, pi);
    value_logs.push_back(value);
    slope_logs.push_back(slope);
  }
  const Complex lv = log_sum_exp(value_logs);
  const Complex ls = log_sum_exp(slope_logs);
  if (ls.real() == kNegInf) return 0.0;
  return std::exp(ls - lv);
}

Evaluation eval_mittag_leffler(double alpha, Complex z) {
  const MlLog l = ml_log(alpha, z);
  Evaluation out;
  out.log_value = l.log;
  out.overflow = l.log.real() > std::log(std::numeric_limits<double>::max());
  out.value = out.overflow ? Complex(std::numeric_limits<double>::infinity(), 0.0) : std::exp(l.log);
  return out;
}

}  // namespace tractlab
