#pragma once

// Logarithmic change of variable F(z) = log f(e^z) on W = exp^-1({|f| > R}),
// its iteration and the sets L = {Re F(z) >= exp(beta Re z)}, T_n.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tractlab/fncat.hpp"
#include "tractlab/tracts.hpp"

namespace tractlab {

struct LogCoordinateState {
  Complex z;
  Complex F;
  long branch_offset = 0;  // Im F = principal argument + 2 pi branch_offset
  bool in_W = false;
};

/// Lifts z to F(z). Without a previous state the principal branch is used (for
/// the exponential family the branch is log(lambda) + e^z). With a previous
/// state the branch is the one nearest to the first-order prediction from it;
/// a predicted phase change beyond pi raises a continuation error.
/// Throws a domain error when z is not in W.
LogCoordinateState lift(const FunctionSpec& spec, double R, Complex z,
                        const LogCoordinateState* previous = nullptr);

/// Like lift, but returns in_W = false instead of throwing when z is not in W.
LogCoordinateState try_lift(const FunctionSpec& spec, double R, Complex z);

/// Lifts every point of a path, continuing each from its predecessor.
std::vector<LogCoordinateState> lift_path(const FunctionSpec& spec, double R,
                                          const std::vector<Complex>& path);

/// F'(z) = e^z f'(e^z) / f(e^z).
Complex F_derivative(const FunctionSpec& spec, Complex z);

/// Log coordinates of each tract's base point: the outer-ring cell of maximal |f|.
std::vector<Complex> tract_base_points(const TractDecomposition& dec);

struct LiftedCell {
  std::size_t cell = 0;
  LogCoordinateState state;
};

/// Lifts every cell of a tract by breadth-first continuation from its base point
/// over 4-neighbours; crossing the angular seam shifts Im z by 2 pi.
std::vector<LiftedCell> lift_tract(const FunctionSpec& spec, const TractDecomposition& dec,
                                   int tract_id);

bool in_L(double beta, const LogCoordinateState& state);

struct OrbitRecord {
  std::vector<LogCoordinateState> states;
  std::optional<int> exit_index;  // first k with F^k(z) not in L
  bool escape_flag = false;       // every recorded iterate stayed in L
  bool certified_by_overflow = false;
  bool lower_bound_held = true;   // Re F^n(z) >= E_beta^n(Re z) at every recorded step
};

/// Iterates F from z for at most n_max steps, stopping at the first exit from L.
/// An orbit whose real part passes 700 is truncated and certified escaping.
OrbitRecord iterate_T(const FunctionSpec& spec, double R, double beta, Complex z, int n_max);

struct ExpansionReport {
  int checked = 0;
  int skipped = 0;     // samples outside W or below the margin
  int violations = 0;  // |F'| < (Re F - log R) / (4 pi)
  double min_ratio = 0.0;  // min over checked of |F'| 4 pi / (Re F - log R)
};

ExpansionReport check_expansion(const FunctionSpec& spec, double R, const std::vector<Complex>& samples,
                                double margin = 0.0);

struct SampleBox {
  double re_min = 0.0, re_max = 5.0;
  double im_min = -3.141592653589793, im_max = 3.141592653589793;
};

/// Uniform rejection sampling of points with Re F >= log R + margin.
std::vector<Complex> sample_W(const FunctionSpec& spec, double R, double margin, const SampleBox& box,
                              int count, std::uint64_t seed, int max_tries = 1000000);

void write_orbit_csv(std::ostream& out, const OrbitRecord& orbit, double beta);

}  // namespace tractlab
