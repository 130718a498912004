#pragma once

// Arithmetic on complex logarithms. A value w is carried as L = log w, with the
// real part possibly far outside the double exponent range.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>

namespace tractlab::detail {

using Complex = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

/// log(sum exp(L_k)). The shift is the dominant term, so the imaginary part of
/// the result follows the dominant term's argument.
inline Complex log_sum_exp(std::span<const Complex> logs) {
  std::size_t best = logs.size();
  for (std::size_t k = 0; k < logs.size(); ++k) {
    if (logs[k].real() == kNegInf) continue;
    if (best == logs.size() || logs[k].real() > logs[best].real()) best = k;
  }
  if (best == logs.size()) return {kNegInf, 0.0};
  const Complex shift = logs[best];
  Complex sum = 0.0;
  for (const Complex& l : logs) {
    if (l.real() == kNegInf) continue;
    sum += std::exp(l - shift);
  }
  if (sum == Complex(0.0, 0.0)) return {kNegInf, 0.0};
  return shift + std::log(sum);
}

inline Complex log_add(Complex a, Complex b) {
  const Complex both[2] = {a, b};
  return log_sum_exp(both);
}

/// Complex log of a plain value, mapping 0 to -inf.
inline Complex safe_log(Complex w) {
  if (w == Complex(0.0, 0.0)) return {kNegInf, 0.0};
  return std::log(w);
}

}  // namespace tractlab::detail
