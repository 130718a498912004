#include "tractlab/tractlab.h"

#include <cstring>
#include <new>
#include <string>

#include "experiments.hpp"
#include "serialize.hpp"
#include "tractlab/error.hpp"
#include "tractlab/fncat.hpp"
#include "tractlab/schroeder.hpp"
#include "tractlab/tracts.hpp"

struct tl_spec {
  tractlab::FunctionSpec spec;
};

struct tl_schroeder {
  tractlab::SchroederSolution sol;
};

struct tl_tracts {
  tractlab::TractDecomposition dec;
};

struct tl_report {
  tractlab::ExperimentResult result;
  std::string json;
};

namespace {

thread_local std::string last_error;

tl_status status_of(tractlab::ErrorCode code) {
  switch (code) {
    case tractlab::ErrorCode::Parameter: return TL_ERR_PARAM;
    case tractlab::ErrorCode::Domain: return TL_ERR_DOMAIN;
    case tractlab::ErrorCode::Overflow: return TL_ERR_OVERFLOW;
    case tractlab::ErrorCode::Continuation: return TL_ERR_CONTINUATION;
    case tractlab::ErrorCode::Io: return TL_ERR_IO;
    default: return TL_ERR_INTERNAL;
  }
}

template <class Fn>
tl_status guarded(Fn&& fn) {
  try {
    fn();
    return TL_OK;
  } catch (const tractlab::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return TL_ERR_PARAM;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TL_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) tractlab::fail(tractlab::ErrorCode::Parameter, what);
}

tractlab::Complex to_cpp(tl_complex z) { return {z.re, z.im}; }
tl_complex to_c(tractlab::Complex z) { return {z.real(), z.imag()}; }

}  // namespace

extern "C" {

const char* tl_version(void) { return tractlab::library_version(); }

const char* tl_last_error(void) { return last_error.c_str(); }

const char* tl_status_name(tl_status status) {
  switch (status) {
    case TL_OK: return "ok";
    case TL_ERR_PARAM: return "parameter error";
    case TL_ERR_DOMAIN: return "domain error";
    case TL_ERR_OVERFLOW: return "overflow";
    case TL_ERR_CONTINUATION: return "continuation error";
    case TL_ERR_IO: return "i/o error";
    case TL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

tl_status tl_spec_parse(const char* text, tl_spec** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new tl_spec{tractlab::parse_spec(text)};
  });
}

void tl_spec_free(tl_spec* spec) { delete spec; }

tl_status tl_spec_text(const tl_spec* spec, char* buf, size_t size, size_t* needed) {
  return guarded([&] {
    require(spec != nullptr, "null spec");
    const std::string s = tractlab::to_string(spec->spec);
    if (needed) *needed = s.size();
    if (buf && size > 0) {
      const size_t n = std::min(size - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

tl_status tl_eval(const tl_spec* spec, tl_complex z, tl_complex* value, tl_complex* log_value, int* overflow) {
  return guarded([&] {
    require(spec != nullptr, "null spec");
    const tractlab::Evaluation e = tractlab::eval(spec->spec, to_cpp(z));
    if (value && !e.overflow) *value = to_c(e.value);
    if (log_value) *log_value = to_c(e.log_value);
    if (overflow) *overflow = e.overflow ? 1 : 0;
  });
}

tl_status tl_log_modulus(const tl_spec* spec, tl_complex z, double* value, int* overflow_safe) {
  return guarded([&] {
    require(spec != nullptr && value != nullptr, "null argument");
    const tractlab::LogModulus m = tractlab::log_modulus(spec->spec, to_cpp(z));
    *value = m.value;
    if (overflow_safe) *overflow_safe = m.overflow_safe ? 1 : 0;
  });
}

tl_status tl_max_modulus(const tl_spec* spec, double r, int samples, double* out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    *out = tractlab::max_modulus(spec->spec, r, samples);
  });
}

tl_status tl_order_estimate(const tl_spec* spec, double r_min, double r_max, int n_points, double* out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    *out = tractlab::order_estimate(spec->spec, r_min, r_max, n_points);
  });
}

tl_status tl_schroeder_create(double beta, tl_schroeder** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = nullptr;
    *out = new tl_schroeder{tractlab::fixed_point(beta)};
  });
}

void tl_schroeder_free(tl_schroeder* sol) { delete sol; }

tl_status tl_schroeder_fixed_point(const tl_schroeder* sol, double* xi, double* mu) {
  return guarded([&] {
    require(sol != nullptr, "null solution");
    if (xi) *xi = sol->sol.xi;
    if (mu) *mu = sol->sol.mu;
  });
}

tl_status tl_schroeder_phi(const tl_schroeder* sol, double x, double* out) {
  return guarded([&] {
    require(sol != nullptr && out != nullptr, "null argument");
    *out = tractlab::phi(sol->sol, x);
  });
}

tl_status tl_schroeder_epsilon(const tl_schroeder* sol, double x, double* out) {
  return guarded([&] {
    require(sol != nullptr && out != nullptr, "null argument");
    *out = tractlab::epsilon(sol->sol, x);
  });
}

tl_status tl_tracts_decompose(const tl_spec* spec, double R, double r_min, double r_max, int n_theta,
                              int rings_per_decade, tl_tracts** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    tractlab::GridParams g;
    g.r_min = r_min;
    g.r_max = r_max;
    g.n_theta = n_theta;
    g.rings_per_decade = rings_per_decade;
    *out = new tl_tracts{tractlab::decompose(spec->spec, R, g)};
  });
}

void tl_tracts_free(tl_tracts* dec) { delete dec; }

tl_status tl_tracts_count(const tl_tracts* dec, int* n_tracts, int* n_islands) {
  return guarded([&] {
    require(dec != nullptr, "null decomposition");
    if (n_tracts) *n_tracts = dec->dec.n_components();
    if (n_islands) *n_islands = static_cast<int>(dec->dec.island_ids.size());
  });
}

tl_status tl_run(const char* command, const char* config_json, tl_report** out) {
  return guarded([&] {
    require(command != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const nlohmann::json cfg =
        config_json && *config_json ? nlohmann::json::parse(config_json) : nlohmann::json::object();
    auto* report = new tl_report{tractlab::run_experiment(command, tractlab::ExperimentConfig::from_json(cfg)), {}};
    report->json = tractlab::write_json(report->result.report);
    *out = report;
  });
}

void tl_report_free(tl_report* report) { delete report; }

tl_verdict tl_report_verdict(const tl_report* report) {
  if (!report) return TL_VERDICT_NONE;
  switch (report->result.verdict) {
    case tractlab::Verdict::Pass: return TL_VERDICT_PASS;
    case tractlab::Verdict::Fail: return TL_VERDICT_FAIL;
    default: return TL_VERDICT_NONE;
  }
}

const char* tl_report_json(const tl_report* report) { return report ? report->json.c_str() : ""; }

size_t tl_report_file_count(const tl_report* report) { return report ? report->result.files.size() : 0; }

const char* tl_report_file_name(const tl_report* report, size_t index) {
  if (!report || index >= report->result.files.size()) return nullptr;
  return report->result.files[index].name.c_str();
}

const char* tl_report_file_data(const tl_report* report, size_t index, size_t* size) {
  if (!report || index >= report->result.files.size()) {
    if (size) *size = 0;
    return nullptr;
  }
  const std::string& content = report->result.files[index].content;
  if (size) *size = content.size();
  return content.data();
}

const char* tl_commands(void) {
  static const std::string names = [] {
    std::string s;
    for (const auto& c : tractlab::experiment_commands()) s += (s.empty() ? "" : " ") + c;
    return s;
  }();
  return names.c_str();
}

}  // extern "C"
