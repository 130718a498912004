#pragma once

// Area and density estimates on square regions: the nested sets T_n in log
// coordinates, escaping-set candidates in the z-plane, and refinement studies.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tractlab/fncat.hpp"

namespace tractlab {

struct SquareRegion {
  Complex center;
  double side = 1.0;
};

/// Q(z): the square of side Re z centred at z.
SquareRegion q_square(Complex z);

inline constexpr int kNeverExit = -1;

enum class EscapeKind { LogCoordinates, ZPlane };

struct EscapeGridReport {
  EscapeKind kind = EscapeKind::LogCoordinates;
  SquareRegion region;
  int resolution = 0;  // cells per side; 0 for Monte Carlo reports
  int n_max = 0;
  std::string mode = "grid";  // "grid" or "monte_carlo"
  std::uint64_t seed = 0;
  std::vector<Complex> points;    // Monte Carlo sample points only
  std::vector<int> cell_exit;     // row-major, bottom row first; kNeverExit if no exit
  std::vector<double> density_sequence;  // n = 0..n_max
  std::vector<double> relative_to_T0;    // dens(T_n, T_0 intersect P)
  std::optional<int> refinement_parent;  // resolution of the coarser report in a chain
};

struct GridOptions {
  unsigned threads = 0;
};

/// Classifies each cell centre of the region with iterate_T; resolution >= 64.
EscapeGridReport tn_density(const FunctionSpec& spec, double R, double beta, const SquareRegion& region,
                            int resolution, int n_max, const GridOptions& options = {});

/// Same report from `samples` uniform random points.
EscapeGridReport tn_density_monte_carlo(const FunctionSpec& spec, double R, double beta,
                                        const SquareRegion& region, int samples, int n_max,
                                        std::uint64_t seed, const GridOptions& options = {});

/// Iterates f directly. Once |f^k| >= escape_radius the orbit must grow
/// monotonically; the exit index is one past the first step where it does not.
/// Orbits that never reach escape_radius within n_max exit at 0, and orbits
/// that leave the floating range are certified escaping.
EscapeGridReport z_plane_escape_density(const FunctionSpec& spec, const SquareRegion& region,
                                        int resolution, int n_max, double escape_radius,
                                        const GridOptions& options = {});

/// dens(C \ L, Q(z)) on a resolution x resolution grid. Requires Re z > 2 log R.
double s_square_density(const FunctionSpec& spec, double R, double beta, Complex z, int resolution = 512,
                        const GridOptions& options = {});

enum class RefinementMode { Positive, Shrinking };

struct RefinementReport {
  RefinementMode mode = RefinementMode::Positive;
  std::vector<int> resolutions;
  std::vector<double> tails;             // last density of each report
  std::vector<double> relative_changes;  // between successive reports
  std::vector<std::uint8_t> shrinking;   // per report: nonincreasing with last < first, or all zero
  double tolerance = 0.25;
  bool pass = false;
};

/// Positive mode passes when every relative tail change is <= tolerance;
/// shrinking mode passes when every report's density sequence shrinks.
RefinementReport refinement_study(const std::vector<EscapeGridReport>& chain, RefinementMode mode,
                                  double tolerance = 0.25);

/// One byte per cell: min(exit, 255), with never-exit cells as 0.
std::vector<std::uint8_t> exit_raster(const EscapeGridReport& report);

bool density_nonincreasing(const EscapeGridReport& report);

}  // namespace tractlab
