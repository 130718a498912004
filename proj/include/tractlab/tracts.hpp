#pragma once

// Super-level sets {|f| > R} on polar grids: tract labelling, angular profiles,
// Tsuji integrals and the growth diagnostics built from them.

#include <cstdint>
#include <string>
#include <vector>

#include "tractlab/fncat.hpp"
#include "tractlab/schroeder.hpp"

namespace tractlab {

struct GridParams {
  double r_min = 5.0;
  double r_max = 100.0;
  int n_theta = 1024;
  int rings_per_decade = 512;
  int n_r = 0;           // explicit ring count; 0 derives it from rings_per_decade
  unsigned threads = 0;  // 0 uses every core
};

/// Rings are log-spaced: ring i covers [r_edges[i], r_edges[i+1]), and cell
/// (i, j) additionally covers [2 pi j / n_theta, 2 pi (j+1) / n_theta).
struct PolarGrid {
  std::vector<double> r_edges;
  std::vector<double> r_centers;  // geometric midpoints
  int n_theta = 0;

  static PolarGrid make(const GridParams& params);
  int n_r() const { return static_cast<int>(r_centers.size()); }
  std::size_t cells() const { return r_centers.size() * static_cast<std::size_t>(n_theta); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_theta + j; }
  double theta_center(int j) const;
  Complex center(int i, int j) const;
  double cell_angle() const;
};

struct ComponentInfo {
  int id = 0;
  std::size_t cells = 0;
  bool touches_inner = false;
  bool touches_outer = false;
};

struct TractDecomposition {
  PolarGrid grid;
  double R = 0.0;
  std::vector<double> log_modulus;  // per cell, at the cell center
  std::vector<int> labels;          // 0 below threshold, otherwise 1..components.size()
  std::vector<ComponentInfo> components;
  std::vector<int> tract_ids;   // components meeting the outer ring
  std::vector<int> island_ids;  // all other components
  std::vector<std::string> warnings;

  int n_components() const { return static_cast<int>(tract_ids.size()); }
};

enum class ScanOrder { Forward, Reverse };

/// Union-find labelling with 4-neighbour adjacency and angular wraparound. Labels
/// are renumbered by first appearance in row-major order, so the result does not
/// depend on the order in which unions were performed.
std::vector<int> label_cells(const std::vector<std::uint8_t>& mask, int n_r, int n_theta,
                             ScanOrder order = ScanOrder::Forward);

/// Requires R > |f(0)|.
TractDecomposition decompose(const FunctionSpec& spec, double R, const GridParams& params);

enum class ProfileKind { Theta, ThetaStar, Psi, M, LogLogM, TsujiIntegral };
const char* to_string(ProfileKind kind);

struct RadialProfile {
  ProfileKind kind = ProfileKind::Theta;
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<std::uint8_t> full_ring;  // ThetaStar: the whole ring lies in the component
};

/// theta(r) of one component; with star = true rings lying entirely in the
/// component carry value 2 pi and full_ring = 1, standing for theta* = infinity.
RadialProfile theta_profile(const TractDecomposition& dec, int component, bool star = false);

/// psi(r): angular measure of component cells with log|f| >= r^beta, 0 < beta < 1/2.
RadialProfile psi_profile(const TractDecomposition& dec, double beta, int component);

/// Sum of psi_j over all tracts.
RadialProfile psi_total(const TractDecomposition& dec, double beta);

/// m(r) = (1 / 2 pi) int_{V_r} (log|f| - r^beta)^2 dt over one component.
RadialProfile m_profile(const TractDecomposition& dec, double beta, int component);

/// log log M(r) on the given radii.
RadialProfile loglogm_profile(const FunctionSpec& spec, const std::vector<double>& radii,
                              int samples = 256);

struct TsujiResult {
  double value = 0.0;
  bool infinite = false;      // some ring in range has zero angular measure
  bool extrapolated = false;  // range reaches beyond the profile's ring centers
  int sentinel_rings = 0;
};

/// pi int_{r0}^{kappa r} dt / (t theta(t)) by the trapezoid rule in log t;
/// full rings contribute 0.
TsujiResult tsuji_integral(const RadialProfile& profile, double r0, double kappa, double r);

struct DcaReport {
  int n = 0;
  std::vector<double> radii;
  std::vector<double> loglogm;
  std::vector<double> residual;  // log log M(r) - (n/2) log r
  double min = 0.0;
  double max = 0.0;
  double budget = 5.0;
  bool bounded_below = false;  // min >= -budget
};

DcaReport verify_dca(const FunctionSpec& spec, int n_components, const std::vector<double>& radii,
                     double budget = 5.0, int samples = 256);

struct Theorem2Report {
  int component = 0;
  double beta = 0.0, r0 = 0.0, kappa = 0.0, budget = 5.0;
  std::vector<double> radii;
  std::vector<double> loglogm;
  std::vector<double> integral;
  std::vector<double> residual;
  std::vector<double> excluded_rings;  // ring radii contained entirely in the component
  double inf = 0.0;
  double final_ratio = 0.0;  // integral / log log M at the last radius
  bool pass = false;
};

/// Residual log log M(r) - pi int_{r0}^{kappa r} dt / (t psi(t)) for one component;
/// a component of 0 uses the total psi over all tracts.
Theorem2Report verify_theorem2(const FunctionSpec& spec, const TractDecomposition& dec, double beta,
                               double r0, double kappa, const std::vector<double>& radii,
                               int component = 0, double budget = 5.0, int samples = 256);

struct HypothesisReport {
  int n = 0;
  std::vector<double> radii;
  std::vector<double> epsilon;
  std::vector<double> loglogm;
  std::vector<double> margin;  // (n/2 + epsilon(r)) log r - log log M(r)
  double min_margin = 0.0;
  bool pass = false;
};

HypothesisReport theorem1_hypothesis(const FunctionSpec& spec, int n_components,
                                     const SchroederSolution& sol, const std::vector<double>& radii,
                                     int samples = 256);

struct ConvexityReport {
  std::vector<double> radii;  // interior radii
  std::vector<double> second_differences;
  double threshold = 0.0;     // tol * max(1, max m)
  double r_start = 0.0;
  double min_second_difference = 0.0;
  double first_violation = 0.0;  // radius, 0 when none
  bool pass = false;
};

/// Discrete second derivative of m with respect to log r; PASS iff every value at
/// radius >= r_start is >= -tol * max(1, max m).
ConvexityReport convexity_check(const RadialProfile& m, double tol = 1e-3, double r_start = 0.0);

struct DeficiencyReport {
  std::vector<double> radii;
  std::vector<double> integral;  // int_{r0}^{r} (2 pi - psi(t)) dt / t
  std::vector<double> ratio;     // integral / log r
  bool decreasing_top_decade = false;
};

DeficiencyReport deficiency_integral(const RadialProfile& psi, double r0);

struct AggregationReport {
  int rings_checked = 0;
  int violations = 0;
};

/// Checks sum_j 1/psi_j >= N^2 / sum_j psi_j on every ring where all psi_j > 0.
AggregationReport cauchy_schwarz_check(const std::vector<RadialProfile>& psi_per_tract);

}  // namespace tractlab
