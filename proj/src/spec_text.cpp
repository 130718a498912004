#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "tractlab/error.hpp"
#include "tractlab/fncat.hpp"

namespace tractlab {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::Parameter, "cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return value;
}

int parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::Parameter, "cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return value;
}

std::vector<Complex> parse_coefficients(std::string_view s) {
  std::vector<Complex> out;
  for (std::string_view part : split(s, ',')) out.push_back(parse_complex(part));
  return out;
}

std::string format_coefficients(const std::vector<Complex>& coeffs) {
  std::string out;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (k > 0) out += ',';
    out += format_complex(coeffs[k]);
  }
  return out;
}

void expect_fields(const std::vector<std::string_view>& f, std::size_t lo, std::size_t hi,
                   std::string_view family) {
  if (f.size() < lo || f.size() > hi)
    fail(ErrorCode::Parameter, "wrong number of fields for family '" + std::string(family) + "'");
}

}  // namespace

Complex parse_complex(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) fail(ErrorCode::Parameter, "empty complex literal");
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, "complex literal"), 0.0};
  s.remove_suffix(1);
  // The imaginary part starts at the last sign that is not an exponent sign.
  std::size_t split_at = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  std::string_view re_text = split_at == std::string_view::npos ? std::string_view{} : s.substr(0, split_at);
  std::string_view im_text = split_at == std::string_view::npos ? s : s.substr(split_at);
  double im = 0.0;
  if (im_text.empty() || im_text == "+") {
    im = 1.0;
  } else if (im_text == "-") {
    im = -1.0;
  } else {
    im = parse_real(im_text, "imaginary part");
  }
  const double re = re_text.empty() ? 0.0 : parse_real(re_text, "real part");
  return {re, im};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_double(z.real());
  std::string out = format_double(z.real());
  if (!std::signbit(z.imag())) out += '+';
  out += format_double(z.imag());
  out += 'i';
  return out;
}

FunctionSpec parse_spec(std::string_view text) {
  const std::vector<std::string_view> f = split(trim(text), ':');
  const std::string_view family = trim(f[0]);
  FunctionSpec spec;
  if (family == "exp") {
    expect_fields(f, 1, 2, family);
    ExpFamily e;
    if (f.size() > 1) e.lambda = parse_complex(f[1]);
    spec = e;
  } else if (family == "sin") {
    expect_fields(f, 1, 3, family);
    SineFamily s;
    if (f.size() > 1) s.alpha = parse_complex(f[1]);
    if (f.size() > 2) s.beta = parse_complex(f[2]);
    spec = s;
  } else if (family == "ml") {
    expect_fields(f, 2, 2, family);
    spec = MittagLeffler{parse_real(f[1], "alpha")};
  } else if (family == "mlpow") {
    expect_fields(f, 3, 3, family);
    spec = MittagLefflerPower{parse_real(f[1], "alpha"), parse_int(f[2], "power")};
  } else if (family == "smlpow") {
    expect_fields(f, 4, 4, family);
    spec = ScaledMittagLefflerPower{parse_real(f[1], "lambda"), parse_real(f[2], "alpha"),
                                    parse_int(f[3], "power")};
  } else if (family == "erdos") {
    expect_fields(f, 3, 4, family);
    ErdosIntegral e;
    e.p = parse_coefficients(f[1]);
    e.q = parse_coefficients(f[2]);
    e.c = f.size() > 3 ? parse_complex(f[3]) : Complex{};
    spec = e;
  } else {
    fail(ErrorCode::Parameter, "unknown function family '" + std::string(family) + "'");
  }
  validate(spec);
  return spec;
}

std::string to_string(const FunctionSpec& spec) {
  if (const auto* e = std::get_if<ExpFamily>(&spec)) return "exp:" + format_complex(e->lambda);
  if (const auto* s = std::get_if<SineFamily>(&spec))
    return "sin:" + format_complex(s->alpha) + ":" + format_complex(s->beta);
  if (const auto* m = std::get_if<MittagLeffler>(&spec)) return "ml:" + format_double(m->alpha);
  if (const auto* m = std::get_if<MittagLefflerPower>(&spec))
    return "mlpow:" + format_double(m->alpha) + ":" + std::to_string(m->power);
  if (const auto* m = std::get_if<ScaledMittagLefflerPower>(&spec))
    return "smlpow:" + format_double(m->lambda) + ":" + format_double(m->alpha) + ":" +
           std::to_string(m->power);
  const auto& e = std::get<ErdosIntegral>(spec);
  return "erdos:" + format_coefficients(e.p) + ":" + format_coefficients(e.q) + ":" +
         format_complex(e.c);
}

}  // namespace tractlab
