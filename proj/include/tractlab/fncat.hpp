#pragma once

// Catalog of entire functions: evaluation in value and log form, maximum
// modulus and growth order.

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tractlab {

using Complex = std::complex<double>;

/// lambda * exp(z)
struct ExpFamily {
  Complex lambda{1.0, 0.0};
};

/// sin(alpha * z + beta)
struct SineFamily {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};
};

/// E_alpha(z) = sum z^n / Gamma(alpha n + 1)
struct MittagLeffler {
  double alpha = 1.0;
};

/// E_alpha(z^N)
struct MittagLefflerPower {
  double alpha = 1.0;
  int power = 1;
};

/// lambda * E_alpha(z^N)
struct ScaledMittagLefflerPower {
  double lambda = 1.0;
  double alpha = 1.0;
  int power = 1;
};

/// integral_0^z P(t) exp(Q(t)) dt + c, coefficients in ascending powers.
struct ErdosIntegral {
  std::vector<Complex> p{Complex{1.0, 0.0}};
  std::vector<Complex> q{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
  Complex c{0.0, 0.0};
};

using FunctionSpec = std::variant<ExpFamily, SineFamily, MittagLeffler, MittagLefflerPower,
                                  ScaledMittagLefflerPower, ErdosIntegral>;

/// Throws Error(Parameter) when the parameters leave the family's domain.
void validate(const FunctionSpec& spec);

// Textual form: exp[:lambda], sin[:alpha[:beta]], ml:alpha, mlpow:alpha:N,
// smlpow:lambda:alpha:N, erdos:<P>:<Q>:<c>. Complex literals are written a+bi,
// coefficient lists are comma separated in ascending powers.
FunctionSpec parse_spec(std::string_view text);
std::string to_string(const FunctionSpec& spec);
Complex parse_complex(std::string_view text);
std::string format_complex(Complex z);
std::string format_double(double x);

/// Complex logarithm of f(z): log|f(z)| + i arg f(z) for some argument, not
/// necessarily the principal one. Callers needing a continuous branch unwrap it.
struct LogEval {
  Complex log;
  bool asymptotic = false;
};

struct Evaluation {
  Complex value;      // meaningful only when !overflow
  Complex log_value;  // log|f| + i arg f
  bool overflow = false;
};

struct LogModulus {
  double value = 0.0;
  bool overflow_safe = false;  // an asymptotic or log-domain path produced the value
};

LogEval log_eval(const FunctionSpec& spec, Complex z);
Evaluation eval(const FunctionSpec& spec, Complex z);
LogModulus log_modulus(const FunctionSpec& spec, Complex z);

/// f'(z)/f(z), closed form where the family has one.
Complex log_derivative(const FunctionSpec& spec, Complex z);

/// log log M(r, f), with M sampled on `samples` points of |z| = r and refined by
/// golden-section search around the best sample.
double max_modulus(const FunctionSpec& spec, double r, int samples = 256);

/// Least-squares slope of log log M(r) against log r over log-spaced radii.
double order_estimate(const FunctionSpec& spec, double r_min, double r_max, int n_points,
                      int samples = 256);

struct SectorBoundReport {
  double max_modulus = 0.0;
  Complex argmax{};
  double bound = 0.0;
  bool within_bound = false;
  int points = 0;
};

/// Samples |E_alpha| over the sector |t - pi| <= (1 - alpha/2) pi. An empty
/// angle list selects 65 equally spaced angles across the sector; angles
/// outside the sector are ignored.
SectorBoundReport sector_bound_check(double alpha, std::span<const double> radii,
                                     std::span<const double> angles, double bound);

/// Default threshold R for tract decompositions of catalog functions.
double default_threshold(const FunctionSpec& spec, double singular_bound = 10.0);

std::vector<double> log_spaced(double a, double b, int n);

}  // namespace tractlab
