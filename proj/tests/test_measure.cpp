#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tractlab/error.hpp"
#include "tractlab/measure.hpp"
#include "tractlab/schroeder.hpp"

using namespace tractlab;
using std::numbers::pi;

namespace {

bool in_unit_range(const std::vector<double>& d) {
  return std::all_of(d.begin(), d.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
}

}  // namespace

TEST_CASE("Q squares") {
  const SquareRegion q = q_square({40.0, 3.0});
  CHECK(q.side == 40.0);
  CHECK(q.center == Complex(40.0, 3.0));
  CHECK_THROWS_AS(q_square({-1.0, 0.0}), Error);
}

TEST_CASE("T_n densities nest") {
  const EscapeGridReport r = tn_density(SineFamily{}, 10.0, 0.25, q_square(8.0), 64, 5);
  CHECK(r.density_sequence.size() == 6);
  CHECK(density_nonincreasing(r));
  CHECK(in_unit_range(r.density_sequence));
  CHECK(r.relative_to_T0.front() == doctest::Approx(r.density_sequence.front() > 0 ? 1.0 : 0.0));
  CHECK_THROWS_AS(tn_density(SineFamily{}, 10.0, 0.25, q_square(8.0), 32, 5), Error);
}

TEST_CASE("a square inside L has T_0 density one") {
  // exp at Re z in [35, 45]: Re F = e^{Re z} cos(Im z) >= e^{Re z / 4} unless cos is tiny.
  const EscapeGridReport r = tn_density(ExpFamily{}, std::exp(1.0), 0.25, {{40.0, 0.0}, 1.0}, 64, 0);
  CHECK(r.density_sequence[0] == 1.0);
}

TEST_CASE("exp densities on Q(40) stabilise above one half") {
  const EscapeGridReport r = tn_density(ExpFamily{}, std::exp(1.0), 0.25, q_square(40.0), 256, 6);
  CHECK(density_nonincreasing(r));
  CHECK(r.density_sequence.back() > 0.5);
  CHECK(r.density_sequence.back() == doctest::Approx(r.density_sequence[1]).epsilon(0.05));
}

TEST_CASE("T_0 density at least 2/3 for sin on Q(40)") {
  const EscapeGridReport r = tn_density(SineFamily{}, 10.0, 0.25, q_square(40.0), 128, 0);
  CHECK(r.density_sequence[0] >= 2.0 / 3.0);
}

TEST_CASE("Monte Carlo reports share the schema and are reproducible") {
  const EscapeGridReport a = tn_density_monte_carlo(SineFamily{}, 10.0, 0.25, q_square(8.0), 2000, 4, 7);
  const EscapeGridReport b = tn_density_monte_carlo(SineFamily{}, 10.0, 0.25, q_square(8.0), 2000, 4, 7);
  CHECK(a.mode == "monte_carlo");
  CHECK(a.points.size() == 2000);
  CHECK(a.cell_exit == b.cell_exit);
  CHECK(density_nonincreasing(a));
  const EscapeGridReport g = tn_density(SineFamily{}, 10.0, 0.25, q_square(8.0), 128, 4);
  CHECK(std::abs(a.density_sequence.back() - g.density_sequence.back()) < 0.05);
}

TEST_CASE("thread count does not change results") {
  GridOptions one{1}, many{4};
  const auto a = z_plane_escape_density(SineFamily{}, {{pi, pi}, 2 * pi}, 96, 10, 100.0, one);
  const auto b = z_plane_escape_density(SineFamily{}, {{pi, pi}, 2 * pi}, 96, 10, 100.0, many);
  CHECK(a.cell_exit == b.cell_exit);
  CHECK(a.density_sequence == b.density_sequence);
}

TEST_CASE("z-plane escape densities") {
  const SquareRegion sq{{pi, pi}, 2 * pi};
  const EscapeGridReport s = z_plane_escape_density(SineFamily{}, sq, 128, 20, 100.0);
  CHECK(density_nonincreasing(s));
  CHECK(s.density_sequence.back() > 0.3);

  // Small multiple of E_1.8 near the origin: every orbit stays bounded.
  const EscapeGridReport basin =
      z_plane_escape_density(ScaledMittagLefflerPower{0.01, 1.8, 1}, {{0.0, 0.0}, 1.0}, 32, 10, 100.0);
  CHECK(std::all_of(basin.density_sequence.begin(), basin.density_sequence.end(),
                    [](double d) { return d == 0.0; }));
  CHECK_THROWS_AS(z_plane_escape_density(SineFamily{}, sq, 32, 4, 100.0), Error);
}

TEST_CASE("square densities of the complement of L") {
  const double small = s_square_density(SineFamily{}, 10.0, 0.25, 6.0, 128);
  const double mid = s_square_density(SineFamily{}, 10.0, 0.25, 10.0, 128);
  const double large = s_square_density(SineFamily{}, 10.0, 0.25, 20.0, 128);
  CHECK(small >= mid);
  CHECK(mid >= large);
  CHECK(small > large);
  CHECK(large >= 0.0);
  CHECK_THROWS_AS(s_square_density(SineFamily{}, 10.0, 0.25, 4.0, 64), Error);
}

TEST_CASE("refinement studies") {
  const SquareRegion sq{{pi, pi}, 2 * pi};
  const auto a = z_plane_escape_density(SineFamily{}, sq, 64, 10, 100.0);
  RefinementReport same = refinement_study({a, a}, RefinementMode::Positive);
  CHECK(same.relative_changes[0] == 0.0);
  CHECK(same.pass);

  const auto b = z_plane_escape_density(SineFamily{}, sq, 128, 10, 100.0);
  CHECK(refinement_study({a, b}, RefinementMode::Positive).pass);

  const auto other = z_plane_escape_density(SineFamily{}, {{0.0, 0.0}, 1.0}, 64, 10, 100.0);
  CHECK_THROWS_AS(refinement_study({a, other}, RefinementMode::Positive), Error);
  CHECK_THROWS_AS(refinement_study({a}, RefinementMode::Positive), Error);

  const FunctionSpec ml = ScaledMittagLefflerPower{0.01, 1.8, 1};
  const SquareRegion wide{{0.0, 0.0}, 400.0};
  const auto c = z_plane_escape_density(ml, wide, 64, 20, 100.0);
  const auto d = z_plane_escape_density(ml, wide, 128, 20, 100.0);
  const RefinementReport shrink = refinement_study({c, d}, RefinementMode::Shrinking);
  CHECK(shrink.pass);
  CHECK(shrink.tails[1] < d.density_sequence[0]);
}

TEST_CASE("exit raster") {
  EscapeGridReport r;
  r.cell_exit = {kNeverExit, 0, 3, 400};
  const auto px = exit_raster(r);
  CHECK(px == std::vector<std::uint8_t>{0, 0, 3, 255});
}
