// Acceptance run: one PASS/FAIL line per criterion, each with its runtime budget.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "experiments.hpp"
#include "tractlab/error.hpp"
#include "tractlab/fncat.hpp"
#include "tractlab/mittag_leffler.hpp"

using namespace tractlab;
using nlohmann::json;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [fail]");
  }
};

ExperimentResult run(const std::string& cmd, std::map<std::string, std::string> kv) {
  return run_experiment(cmd, ExperimentConfig(std::move(kv)));
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

void criterion_1(Outcome& o) {
  for (const char* beta : {"0.1", "0.2", "0.3"}) {
    const ExperimentResult r = run("schroeder", {{"beta", beta}});
    const json& j = r.report;
    o.require(j["fixed_point_residual"].get<double>() <= 1e-10 && j["max_functional_residual"].get<double>() <= 1e-8 &&
                  j["epsilon_decreasing"].get<bool>(),
              std::string("beta ") + beta + " fp " + num(j["fixed_point_residual"]) + " fe " +
                  num(j["max_functional_residual"]));
  }
}

void criterion_2(Outcome& o) {
  double e1 = 0.0;
  for (int i = 0; i <= 20; ++i)
    for (int k = 0; k <= 20; ++k) {
      const Complex z(-5.0 + 0.5 * i, -5.0 + 0.5 * k);
      e1 = std::max(e1, std::abs(eval_mittag_leffler(1.0, z).value - std::exp(z)) / std::abs(std::exp(z)));
    }
  o.require(e1 <= 1e-9, "E1 lattice " + num(e1));

  // Polar lattice over |z| <= 10; relative error is skipped where cosh vanishes.
  double e2 = 0.0;
  for (int i = 1; i <= 40; ++i)
    for (int k = 0; k < 72; ++k) {
      const Complex z = std::polar(0.25 * i, 2 * pi * k / 72);
      const Complex c = std::cosh(z);
      if (std::abs(c) < 1e-3) continue;
      e2 = std::max(e2, std::abs(eval_mittag_leffler(2.0, z * z).value - c) / std::abs(c));
    }
  o.require(e2 <= 1e-6, "E2(z^2)/cosh " + num(e2));

  const SectorBoundReport s = sector_bound_check(1.5, log_spaced(1.0, 1e3, 120), {}, 10.0);
  o.require(s.within_bound, "max |E_1.5| in sector " + num(s.max_modulus));
}

void criterion_3(Outcome& o) {
  for (const char* a : {"0.6", "0.8", "1.0", "1.5"}) {
    const double expected = 1.0 / std::stod(a);
    const ExperimentResult r = run("order", {{"spec", std::string("ml:") + a},
                                             {"expected", std::to_string(expected)},
                                             {"tolerance", "0.05"}});
    o.require(r.verdict == Verdict::Pass, std::string("ml:") + a + " " + num(r.report["order"]));
  }
  const ExperimentResult p =
      run("order", {{"spec", "mlpow:0.9:3"}, {"expected", std::to_string(3 / 0.9)}, {"tolerance", "0.1"}});
  o.require(p.verdict == Verdict::Pass, "mlpow:0.9:3 " + num(p.report["order"]));
}

void criterion_4(Outcome& o) {
  struct Row {
    const char* spec;
    const char* annulus;
    const char* n;
  };
  for (const Row& row : {Row{"exp", "5:100", "1"}, Row{"sin", "5:100", "2"}, Row{"mlpow:0.9:3", "5:200", "3"}}) {
    const ExperimentResult r = run("tracts", {{"spec", row.spec}, {"R", "10"}, {"annulus", row.annulus},
                                              {"ntheta", "512"}, {"expected_n", row.n}, {"doubling", "true"}});
    o.require(r.verdict == Verdict::Pass, std::string(row.spec) + " N=" + r.report["n_components"].dump() +
                                              " doubled " + r.report["n_components_doubled"].dump());
  }
}

void criterion_5(Outcome& o) {
  const ExperimentResult e = run("tsuji", {{"spec", "exp"}, {"R", "10"}, {"annulus", "5:1e4"}, {"r0", "10"},
                                           {"kappa", "0.5"}, {"radii", "1e2:1e4"}, {"ratio_band", "0.8:1.2"}});
  const json& t = e.report["theorem2"];
  o.require(t["pass"].get<bool>(), "exp inf residual " + num(t["inf"]));
  o.require(e.report["ratio_in_band"].get<bool>(), "exp ratio at 1e4 " + num(t["final_ratio"]));
  // kappa r stays below 5000, and sin needs a fine angular grid to keep its tracts apart.
  for (const char* comp : {"1", "2"}) {
    const ExperimentResult s = run("tsuji", {{"spec", "sin"}, {"R", "10"}, {"annulus", "5:5100"},
                                             {"ntheta", "8192"}, {"rings_per_decade", "256"}, {"r0", "10"},
                                             {"kappa", "0.5"}, {"radii", "1e2:1e4"}, {"component", comp}});
    o.require(s.report["theorem2"]["pass"].get<bool>() && s.report["n_components"] == 2,
              std::string("sin tract ") + comp + " inf " + num(s.report["theorem2"]["inf"]));
  }
}

void criterion_6(Outcome& o) {
  const ExperimentResult r = run("dca", {{"spec", "sin"}, {"radii", "10:1e4"}, {"max_abs_residual", "1"}});
  o.require(r.verdict == Verdict::Pass && r.report["N"] == 2,
            "N=" + r.report["N"].dump() + " residual in [" + num(r.report["min_residual"]) + ", " +
                num(r.report["max_residual"]) + "]");
}

void criterion_7(Outcome& o) {
  const ExperimentResult s = run("hypothesis", {{"spec", "sin"}, {"beta", "0.2"}, {"radii", "1e2:1e6"}});
  o.require(s.verdict == Verdict::Pass, "sin " + std::string(to_string(s.verdict)) + " margin " +
                                            num(s.report["min_margin"]));
  const ExperimentResult e = run("hypothesis", {{"spec", "exp"}, {"N", "1"}, {"beta", "0.2"}, {"radii", "1e2:1e6"}});
  o.require(e.verdict == Verdict::Fail, "exp " + std::string(to_string(e.verdict)));
  for (const char* spec : {"smlpow:0.01:1.8:1", "smlpow:0.1:1.8:1"}) {
    const ExperimentResult m = run("hypothesis", {{"spec", spec}, {"beta", "0.2"}, {"radii", "1e2:1e6"}});
    o.require(m.verdict == Verdict::Fail, std::string(spec) + " " + to_string(m.verdict) + " N=" +
                                              m.report["N"].dump());
  }
}

void criterion_8(Outcome& o) {
  const ExperimentResult r = run("mprofile", {{"spec", "exp"}, {"R", "10"}, {"beta", "0.25"}, {"annulus", "50:1e4"},
                                              {"tol", "1e-3"}, {"band", "0.05:10"}, {"band_radii", "1e2:1e4"}});
  const json& band = r.report["m_over_r"];
  o.require(band["in_band"].get<bool>(), "m/r in [" + num(band["min"]) + ", " + num(band["max"]) + "]");
  o.require(r.report["convexity"]["pass"].get<bool>(),
            "convexity min second difference " + num(r.report["convexity"]["min_second_difference"]));
}

void criterion_9(Outcome& o) {
  struct Row {
    const char* spec;
    const char* R;
    const char* box_re;
  };
  for (const Row& row : {Row{"exp", "10", "0:5"}, Row{"sin", "10", "0:5"}, Row{"ml:0.5", "10", "0:4"},
                         Row{"ml:1.8", "10", "0:6"}, Row{"mlpow:0.9:3", "10", "0:3"},
                         Row{"smlpow:0.01:1.8:1", "10", "0:6"}, Row{"erdos:1:0,0,-1:0", "20", "0:2.5"}}) {
    const ExperimentResult r = run("logvar", {{"spec", row.spec}, {"R", row.R}, {"box_re", row.box_re},
                                              {"samples", "1000"}, {"margin", "1"}});
    const json& x = r.report["expansion"];
    o.require(r.verdict == Verdict::Pass && x["checked"] == 1000,
              std::string(row.spec) + " " + x["violations"].dump() + "/" + x["checked"].dump());
  }
}

void criterion_10(Outcome& o) {
  std::vector<json> reports;

  const ExperimentResult d = run("schroeder", {{"beta", "0.2"}, {"x0", "20"}, {"n_delta", "20"}});
  const std::vector<double> prod = d.report["delta"]["partial_products"].get<std::vector<double>>();
  o.require(d.verdict == Verdict::Pass && !prod.empty() && prod.size() <= 20 && prod.front() >= 0.9 - 1e-15 &&
                prod.back() > 0.75,
            "partial products " + num(prod.empty() ? NAN : prod.front()) + " -> " +
                num(prod.empty() ? NAN : prod.back()));

  const ExperimentResult s = run("refine", {{"spec", "sin"}, {"kind", "zplane"}, {"resolutions", "512,1024"},
                                            {"study", "positive"}, {"tolerance", "0.25"}});
  for (const json& r : s.report["reports"]) reports.push_back(r);
  o.require(s.verdict == Verdict::Pass,
            "sin z-plane tails " + s.report["refinement"]["tails"].dump() + " change " +
                num(s.report["refinement"]["relative_changes"][0]));

  const ExperimentResult m = run("escape", {{"spec", "smlpow:0.01:1.8:1"}, {"kind", "zplane"}, {"center", "0"},
                                            {"side", "400"}, {"resolution", "256"}, {"n_max", "20"}});
  const std::vector<double> seq = m.report["escape"]["density_sequence"].get<std::vector<double>>();
  reports.push_back(m.report["escape"]);
  o.require(m.verdict == Verdict::Pass && seq.back() < seq.front(),
            "E_1.8 density " + num(seq.front()) + " -> " + num(seq.back()));

  for (const char* spec : {"exp", "sin"}) {
    const ExperimentResult t = run("escape", {{"spec", spec}, {"kind", "tn"}, {"resolution", "256"}, {"n_max", "6"}});
    reports.push_back(t.report["escape"]);
  }
  bool all = true;
  for (const json& r : reports) all = all && r["nonincreasing"].get<bool>();
  o.require(all, std::to_string(reports.size()) + " reports nonincreasing");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> body;
  };
  const Criterion criteria[] = {
      {1, "Schroeder suite", 5, criterion_1},
      {2, "Mittag-Leffler accuracy", 30, criterion_2},
      {3, "order recovery", 30, criterion_3},
      {4, "tract counts", 60, criterion_4},
      {5, "Tsuji lower bound", 60, criterion_5},
      {6, "DCA residual", 5, criterion_6},
      {7, "growth hypothesis", 10, criterion_7},
      {8, "m(r) diagnostics", 30, criterion_8},
      {9, "expansion bound", 10, criterion_9},
      {10, "measure machinery", 300, criterion_10},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < c.budget_s, "runtime " + num(secs) + " s < " + num(c.budget_s) + " s");
    failures += !o.pass;
    std::printf("criterion %2d %-24s %s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
