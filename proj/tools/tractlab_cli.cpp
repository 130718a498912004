// Command-line front end. Every subcommand collects flags and an optional flat
// config file into one key/value set and hands it to tl_run; the report JSON is
// printed and the data files are written to the output directory.
//
// Exit status: 0 on PASS (or when nothing is checked), 2 on a checked FAIL,
// 1 on any error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tractlab/tractlab.h"

namespace {

struct Key {
  const char* name;
  const char* help;
};

const Key kKeys[] = {
    {"spec", "function, e.g. exp, sin:1:0, ml:0.8, mlpow:0.9:3, smlpow:0.01:1.8:1, erdos:1:0,0,-1:0"},
    {"z", "complex point a+bi"},
    {"R", "threshold R (default from the function family)"},
    {"singular_bound", "singular-value bound used for the default R"},
    {"annulus", "grid annulus r_min:r_max"},
    {"ntheta", "angular cells"},
    {"rings_per_decade", "radial rings per decade"},
    {"radii", "radius range a:b (log-spaced)"},
    {"n", "number of radii or sample points"},
    {"samples", "circle samples, expansion samples or Monte Carlo points"},
    {"expected", "expected order"},
    {"tolerance", "tolerance for order or refinement checks"},
    {"expected_n", "expected number of tracts"},
    {"doubling", "also decompose with doubled ntheta"},
    {"star", "theta* variant with full-ring flags"},
    {"component", "component id (0 selects every tract)"},
    {"beta", "exponent beta"},
    {"r0", "lower integration limit"},
    {"kappa", "upper limit factor in (0, 1)"},
    {"budget", "lower-bound budget C"},
    {"ratio_band", "band lo:hi for |integral / log log M| at the last radius"},
    {"N", "number of tracts (skips the decomposition)"},
    {"max_abs_residual", "cap on |residual|"},
    {"tol", "tolerance (Koenigs iteration or convexity)"},
    {"depth", "Koenigs iteration cap"},
    {"x", "comma-separated evaluation points"},
    {"xmin", "lower end of the x grid"},
    {"xmax", "upper end of the x grid"},
    {"x0", "orbit start for the delta sequence"},
    {"n_delta", "number of delta terms"},
    {"eta", "product parameter (default 0.1 / delta_1)"},
    {"r_start", "radius where the convexity check starts"},
    {"band", "band lo:hi for m(r)/r"},
    {"band_radii", "radius range for the m(r)/r band"},
    {"n_max", "iteration depth"},
    {"box_re", "real range of the sample box a:b"},
    {"box_im", "imaginary range of the sample box a:b"},
    {"margin", "sample only where Re F >= log R + margin"},
    {"seed", "random seed"},
    {"kind", "zplane or tn"},
    {"center", "square centre a+bi"},
    {"side", "square side (default: Q(center) for tn, 2 pi for zplane)"},
    {"escape_radius", "z-plane escape radius"},
    {"mode", "grid or monte_carlo"},
    {"resolution", "cells per side"},
    {"resolutions", "comma-separated resolutions"},
    {"study", "refinement criterion: positive or shrinking"},
};

const std::map<std::string, std::string> kCommandHelp{
    {"eval", "evaluate f and log f at one point"},
    {"maxmod", "log log M(r) on log-spaced radii"},
    {"order", "order of growth from a log-log fit"},
    {"tracts", "count tracts of {|f| > R} on a polar grid"},
    {"theta", "angular measure theta(r) of each tract"},
    {"psi", "angular measure psi(r) with deficiency and aggregation checks"},
    {"tsuji", "lower bound for log log M from the psi integral"},
    {"dca", "log log M(r) against (N/2) log r"},
    {"hypothesis", "growth hypothesis with the Schroeder epsilon"},
    {"schroeder", "fixed point, Phi and epsilon of exp(beta x)"},
    {"mprofile", "m(r) profile and its convexity in log r"},
    {"logvar", "logarithmic change of variable: orbits and expansion"},
    {"escape", "escape densities on a square grid"},
    {"refine", "escape densities across resolutions"},
};

const std::map<std::string, std::vector<std::string>> kCommandKeys{
    {"eval", {"spec", "z"}},
    {"maxmod", {"spec", "radii", "n", "samples"}},
    {"order", {"spec", "radii", "n", "samples", "expected", "tolerance"}},
    {"tracts", {"spec", "R", "singular_bound", "annulus", "ntheta", "rings_per_decade", "expected_n", "doubling"}},
    {"theta", {"spec", "R", "singular_bound", "annulus", "ntheta", "rings_per_decade", "component", "star"}},
    {"psi", {"spec", "R", "singular_bound", "annulus", "ntheta", "rings_per_decade", "component", "beta", "r0"}},
    {"tsuji",
     {"spec", "R", "singular_bound", "annulus", "ntheta", "rings_per_decade", "component", "beta", "r0", "kappa",
      "budget", "radii", "n", "ratio_band"}},
    {"dca",
     {"spec", "N", "R", "singular_bound", "annulus", "ntheta", "rings_per_decade", "radii", "n", "budget",
      "max_abs_residual"}},
    {"hypothesis",
     {"spec", "N", "R", "singular_bound", "annulus", "ntheta", "rings_per_decade", "beta", "radii", "n"}},
    {"schroeder", {"beta", "tol", "depth", "x", "xmin", "xmax", "n", "x0", "n_delta", "eta"}},
    {"mprofile",
     {"spec", "R", "singular_bound", "annulus", "ntheta", "rings_per_decade", "beta", "component", "tol",
      "r_start", "band", "band_radii"}},
    {"logvar",
     {"spec", "R", "singular_bound", "beta", "z", "n_max", "box_re", "box_im", "margin", "samples", "seed"}},
    {"escape",
     {"spec", "kind", "center", "side", "resolution", "n_max", "escape_radius", "R", "singular_bound", "beta",
      "mode", "samples", "seed"}},
    {"refine",
     {"spec", "kind", "center", "side", "resolutions", "n_max", "escape_radius", "R", "singular_bound", "beta",
      "study", "tolerance"}},
};

const char* help_of(const std::string& key) {
  for (const Key& k : kKeys)
    if (key == k.name) return k.help;
  return "";
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

// Flat "key = value" file; blank lines and lines starting with '#' or ';' are
// skipped, section headers are not allowed.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || t[0] == '[')
      throw std::runtime_error(path + ":" + std::to_string(number) + ": expected key = value");
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out[trim(t.substr(0, eq))] = value;
  }
  return out;
}

int write_outputs(const tl_report* report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << dir << ": " << ec.message() << "\n";
    return 1;
  }
  for (size_t k = 0; k < tl_report_file_count(report); ++k) {
    size_t size = 0;
    const char* data = tl_report_file_data(report, k, &size);
    const auto path = dir / tl_report_file_name(report, k);
    std::ofstream out(path, std::ios::binary);
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) {
      std::cerr << "error: cannot write " << path << "\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tractlab: tracts, growth and escaping-set measure for entire functions"};
  app.require_subcommand(1);
  app.footer(
      "Function specs: exp[:lambda]  sin[:alpha[:beta]]  ml:alpha  mlpow:alpha:N\n"
      "  smlpow:lambda:alpha:N  erdos:P:Q[:c]  (P, Q comma-separated, ascending powers).\n"
      "Complex literals: 2, -1.5, 3i, 1+2i, 1e3-4.5i. Values starting with '-' need --key=value.\n"
      "Exit status: 0 pass or unchecked, 2 checked failure, 1 error.\n"
      "TRACTLAB_OUTPUT_DIR overrides the output directory.");

  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 0;
  bool quiet = false;
  bool no_files = false;
  std::map<std::string, std::map<std::string, std::string>> flags;

  for (const auto& [command, keys] : kCommandKeys) {
    CLI::App* sub = app.add_subcommand(command, kCommandHelp.at(command));
    sub->add_option("--config", config_path, "flat key = value file; flags override it");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (0 uses every core)");
    sub->add_flag("--quiet", quiet, "do not print the report");
    sub->add_flag("--no-files", no_files, "do not write output files");
    for (const std::string& key : keys) {
      sub->add_option_function<std::string>(
          "--" + key, [&flags, command, key](const std::string& v) { flags[command][key] = v; }, help_of(key));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  nlohmann::json config = nlohmann::json::object();
  try {
    if (!config_path.empty())
      for (const auto& [k, v] : read_config(config_path)) config[k] = v;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& [k, v] : flags[command]) config[k] = v;
  config["threads"] = std::to_string(threads);

  tl_report* report = nullptr;
  const tl_status status = tl_run(command.c_str(), config.dump().c_str(), &report);
  if (status != TL_OK) {
    std::cerr << "error (" << tl_status_name(status) << "): " << tl_last_error() << "\n";
    return 1;
  }
  if (!quiet) std::cout << tl_report_json(report);
  int rc = 0;
  if (!no_files) {
    const char* env = std::getenv("TRACTLAB_OUTPUT_DIR");
    rc = write_outputs(report, env && *env ? std::filesystem::path(env) : std::filesystem::path(out_dir));
  }
  const tl_verdict verdict = tl_report_verdict(report);
  tl_report_free(report);
  if (rc != 0) return rc;
  return verdict == TL_VERDICT_FAIL ? 2 : 0;
}
