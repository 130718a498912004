#include "tractlab/fncat.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "logsum.hpp"
#include "tractlab/error.hpp"
#include "tractlab/mittag_leffler.hpp"

namespace tractlab {
namespace {

using detail::kNegInf;
using std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const double kLogMax = std::log(std::numeric_limits<double>::max());

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Complex horner(const std::vector<Complex>& coeffs, Complex z) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// log sin w without overflow for large |Im w|.
Complex log_sin(Complex w) {
  const Complex i(0.0, 1.0);
  if (std::abs(w.imag()) < 15.0) return detail::safe_log(std::sin(w));
  if (w.imag() > 0.0) {
    const Complex u = std::exp(2.0 * i * w);
    return -i * w + (-u - 0.5 * u * u) - std::log(2.0) + Complex(0.0, pi / 2.0);
  }
  const Complex v = std::exp(-2.0 * i * w);
  return i * w + (-v - 0.5 * v * v) - std::log(2.0) - Complex(0.0, pi / 2.0);
}

Complex cot(Complex w) {
  const Complex i(0.0, 1.0);
  if (w.imag() >= 0.0) {
    const Complex u = std::exp(2.0 * i * w);
    return i * (u + 1.0) / (u - 1.0);
  }
  const Complex v = std::exp(-2.0 * i * w);
  return i * (1.0 + v) / (1.0 - v);
}

// int_0^z P(t) e^{Q(t)} dt = z e^shift int_0^1 P(sz) e^{Q(sz) - shift} ds, with the
// shift taken as the largest sampled Re Q on the segment. Returns the log.
Complex erdos_integral_log(const ErdosIntegral& f, Complex z) {
  if (z == Complex(0.0, 0.0)) return {kNegInf, 0.0};
  double shift = kNegInf;
  for (int j = 0; j <= 64; ++j) shift = std::max(shift, horner(f.q, (j / 64.0) * z).real());
  auto integrand = [&](double s) {
    const Complex t = s * z;
    return horner(f.p, t) * std::exp(horner(f.q, t) - shift);
  };
  using Rule = boost::math::quadrature::gauss<double, 20>;
  auto composite = [&](int panels) {
    Complex sum = 0.0;
    for (int k = 0; k < panels; ++k)
      sum += Rule::integrate(integrand, double(k) / panels, double(k + 1) / panels);
    return sum;
  };
  int panels = 1;
  Complex previous = composite(panels);
  constexpr int kMaxPanels = 1 << 16;
  for (;;) {
    if (panels >= kMaxPanels) fail(ErrorCode::Domain, "Erdos quadrature along [0, z] did not converge");
    panels *= 2;
    const Complex current = composite(panels);
    const double scale = std::max(std::abs(current), std::numeric_limits<double>::min());
    const bool done = std::abs(current - previous) < 1e-10 * scale;
    previous = current;
    if (done) break;
  }
  return shift + std::log(z) + detail::safe_log(previous);
}

double golden_max(const FunctionSpec& spec, double r, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto value = [&](double t) { return log_modulus(spec, std::polar(r, t)).value; };
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = value(c), fd = value(d);
  for (int it = 0; it < 40; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = value(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

void validate(const FunctionSpec& spec) {
  auto check_alpha = [](double a) {
    if (!(a > 0.0 && a <= 2.0)) fail(ErrorCode::Parameter, "Mittag-Leffler alpha must lie in (0, 2]");
  };
  auto check_power = [](int n) {
    if (n < 1 || n > 64) fail(ErrorCode::Parameter, "power N must lie in [1, 64]");
  };
  std::visit(Overloaded{
                 [](const ExpFamily& f) {
                   if (!finite(f.lambda) || f.lambda == Complex(0.0, 0.0))
                     fail(ErrorCode::Parameter, "exp family needs a finite nonzero lambda");
                 },
                 [](const SineFamily& f) {
                   if (!finite(f.alpha) || !finite(f.beta) || f.alpha == Complex(0.0, 0.0))
                     fail(ErrorCode::Parameter, "sine family needs finite alpha != 0 and beta");
                 },
                 [&](const MittagLeffler& f) { check_alpha(f.alpha); },
                 [&](const MittagLefflerPower& f) {
                   check_alpha(f.alpha);
                   check_power(f.power);
                 },
                 [&](const ScaledMittagLefflerPower& f) {
                   if (!(f.lambda > 0.0) || !std::isfinite(f.lambda))
                     fail(ErrorCode::Parameter, "scale lambda must be positive");
                   check_alpha(f.alpha);
                   check_power(f.power);
                 },
                 [](const ErdosIntegral& f) {
                   if (f.p.empty() || f.q.empty())
                     fail(ErrorCode::Parameter, "polynomial coefficient lists must be nonempty");
                   if (std::all_of(f.p.begin(), f.p.end(),
                                   [](Complex c) { return c == Complex(0.0, 0.0); }))
                     fail(ErrorCode::Parameter, "P must not vanish identically");
                   for (Complex c : f.p)
                     if (!finite(c)) fail(ErrorCode::Parameter, "P coefficients must be finite");
                   for (Complex c : f.q)
                     if (!finite(c)) fail(ErrorCode::Parameter, "Q coefficients must be finite");
                   if (!finite(f.c)) fail(ErrorCode::Parameter, "constant c must be finite");
                 },
             },
             spec);
}

LogEval log_eval(const FunctionSpec& spec, Complex z) {
  if (!finite(z)) fail(ErrorCode::Parameter, "argument must be finite");
  validate(spec);
  return std::visit(
      Overloaded{
          [&](const ExpFamily& f) { return LogEval{std::log(f.lambda) + z, false}; },
          [&](const SineFamily& f) { return LogEval{log_sin(f.alpha * z + f.beta), false}; },
          [&](const MittagLeffler& f) {
            const MlLog l = ml_log(f.alpha, z);
            const bool asym =
                l.branch == MlBranch::AsymptoticGrowth || l.branch == MlBranch::AsymptoticDecay;
            return LogEval{l.log, asym};
          },
          [&](const MittagLefflerPower& f) {
            const MlLog l = ml_log(f.alpha, std::pow(z, f.power));
            const bool asym =
                l.branch == MlBranch::AsymptoticGrowth || l.branch == MlBranch::AsymptoticDecay;
            return LogEval{l.log, asym};
          },
          [&](const ScaledMittagLefflerPower& f) {
            const MlLog l = ml_log(f.alpha, std::pow(z, f.power));
            const bool asym =
                l.branch == MlBranch::AsymptoticGrowth || l.branch == MlBranch::AsymptoticDecay;
            return LogEval{std::log(f.lambda) + l.log, asym};
          },
          [&](const ErdosIntegral& f) {
            return LogEval{detail::log_add(detail::safe_log(f.c), erdos_integral_log(f, z)), false};
          },
      },
      spec);
}

Evaluation eval(const FunctionSpec& spec, Complex z) {
  const LogEval l = log_eval(spec, z);
  Evaluation out;
  out.log_value = l.log;
  out.overflow = l.log.real() > kLogMax;
  if (out.overflow) {
    out.value = Complex(std::numeric_limits<double>::infinity(), 0.0);
  } else if (const auto* s = std::get_if<SineFamily>(&spec);
             s != nullptr && std::abs((s->alpha * z + s->beta).imag()) < 700.0) {
    out.value = std::sin(s->alpha * z + s->beta);
  } else if (l.log.real() == kNegInf) {
    out.value = 0.0;
  } else {
    out.value = std::exp(l.log);
  }
  if (!finite(out.value)) {
    out.overflow = true;
    out.value = Complex(std::numeric_limits<double>::infinity(), 0.0);
  }
  return out;
}

LogModulus log_modulus(const FunctionSpec& spec, Complex z) {
  const LogEval l = log_eval(spec, z);
  return {l.log.real(), l.asymptotic || l.log.real() > kLogMax};
}

Complex log_derivative(const FunctionSpec& spec, Complex z) {
  if (!finite(z)) fail(ErrorCode::Parameter, "argument must be finite");
  validate(spec);
  return std::visit(
      Overloaded{
          [&](const ExpFamily&) { return Complex(1.0, 0.0); },
          [&](const SineFamily& f) { return f.alpha * cot(f.alpha * z + f.beta); },
          [&](const MittagLeffler& f) { return ml_log_derivative(f.alpha, z); },
          [&](const MittagLefflerPower& f) {
            return double(f.power) * std::pow(z, f.power - 1) *
                   ml_log_derivative(f.alpha, std::pow(z, f.power));
          },
          [&](const ScaledMittagLefflerPower& f) {
            return double(f.power) * std::pow(z, f.power - 1) *
                   ml_log_derivative(f.alpha, std::pow(z, f.power));
          },
          [&](const ErdosIntegral& f) {
            const Complex p = horner(f.p, z);
            if (p == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
            const Complex lf = log_eval(spec, z).log;
            return std::exp(std::log(p) + horner(f.q, z) - lf);
          },
      },
      spec);
}

double max_modulus(const FunctionSpec& spec, double r, int samples) {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::Parameter, "radius must be positive");
  if (samples < 64) fail(ErrorCode::Parameter, "max_modulus needs at least 64 samples");
  const double step = 2.0 * pi / samples;
  int best = 0;
  double best_value = kNegInf;
  for (int j = 0; j < samples; ++j) {
    const double v = log_modulus(spec, std::polar(r, j * step)).value;
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  const double refined = golden_max(spec, r, (best - 1) * step, (best + 1) * step);
  const double log_m = std::max(best_value, refined);
  if (!(log_m > 0.0)) fail(ErrorCode::Domain, "M(r) <= 1, log log M(r) is undefined");
  return std::log(log_m);
}

double order_estimate(const FunctionSpec& spec, double r_min, double r_max, int n_points,
                      int samples) {
  if (!(r_min > 1.0 && r_max > r_min)) fail(ErrorCode::Parameter, "order_estimate needs 1 < r_min < r_max");
  if (n_points < 3) fail(ErrorCode::Parameter, "order_estimate needs at least 3 radii");
  const std::vector<double> radii = log_spaced(r_min, r_max, n_points);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double r : radii) {
    const double x = std::log(r);
    const double y = max_modulus(spec, r, samples);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = n_points;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SectorBoundReport sector_bound_check(double alpha, std::span<const double> radii,
                                     std::span<const double> angles, double bound) {
  if (!(alpha > 0.0 && alpha < 2.0)) fail(ErrorCode::Parameter, "sector check needs alpha in (0, 2)");
  const double half = (1.0 - alpha / 2.0) * pi;
  std::vector<double> grid;
  if (angles.empty()) {
    for (int j = 0; j <= 64; ++j) grid.push_back(pi - half + 2.0 * half * j / 64.0);
  } else {
    for (double t : angles)
      if (std::abs(t - pi) <= half) grid.push_back(t);
  }
  SectorBoundReport out;
  out.bound = bound;
  double best = kNegInf;
  for (double r : radii) {
    for (double t : grid) {
      const Complex z = std::polar(r, t);
      const double v = ml_log(alpha, z).log.real();
      ++out.points;
      if (v > best) {
        best = v;
        out.argmax = z;
      }
    }
  }
  out.max_modulus = out.points > 0 ? std::exp(best) : 0.0;
  out.within_bound = out.max_modulus <= bound;
  return out;
}

double default_threshold(const FunctionSpec& spec, double singular_bound) {
  const double bound = std::visit(Overloaded{
                                      [](const ExpFamily& f) { return std::abs(f.lambda); },
                                      [](const SineFamily&) { return 1.0; },
                                      [&](const auto&) { return singular_bound; },
                                  },
                                  spec);
  const Evaluation at0 = eval(spec, 0.0);
  const double f0 = at0.overflow ? std::numeric_limits<double>::infinity() : std::abs(at0.value);
  return std::max({10.0, 2.0 * f0, 2.0 * bound});
}

std::vector<double> log_spaced(double a, double b, int n) {
  if (!(a > 0.0 && b > 0.0)) fail(ErrorCode::Parameter, "log-spaced grid needs positive endpoints");
  if (n < 1) fail(ErrorCode::Parameter, "grid needs at least one point");
  if (n == 1) return {a};
  std::vector<double> out(n);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) out[i] = std::exp(la + (lb - la) * i / (n - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

}  // namespace tractlab
