// Finite-difference p-Laplace solver: closed-form oracles, structural
// invariants (homogeneity, comparison, coercivity), and input validation.
#include <cmath>
#include <vector>

#include "doctest.h"
#include "solver.hpp"
#include "spaces.hpp"

using namespace rispace;

namespace {

GridFunction unit_load(const Grid& g) { return GridFunction::constant(g, 1.0); }

// Torsion solution of -u'' = 1 on (0,1): u(x) = x(1-x)/2, max 1/8 at 1/2.
constexpr double kTorsionMax = 0.125;
// ||u'||_{L^2} for the same u: u'(x) = 1/2 - x, integral of (1/2-x)^2 is 1/12.
constexpr double kTorsionGradL2 = 0.28867513459481288;  // 1/(2 sqrt 3)
// -(|u'|u')' = 1 (p = 3): u(1/2) = (1/3) 2^{-1/2}.
constexpr double kPThreeMid = 0.23570226039551584;
// p = 3/2: u(1/2) = 1/24 (gradient (1/2 - x)^2 signed).
constexpr double kPHalfMid = 1.0 / 24.0;

}  // namespace

TEST_CASE("1-D solves reproduce closed-form midpoint values") {
  Grid g = Grid::interval(255);
  const double tol = 1e-10;

  SUBCASE("p = 2 torsion function") {
    GridFunction u = solve_weak(g, 2.0, PotentialSpec{}, unit_load(g), tol);
    CHECK(u.max_abs() == doctest::Approx(kTorsionMax).epsilon(1e-4));
    GradientField du = gradient_of(u);
    CHECK(gradient_norm(du, SpaceSpec::lebesgue(2.0)) ==
          doctest::Approx(kTorsionGradL2).epsilon(2e-2));
  }
  SUBCASE("p = 3 degenerate diffusion") {
    GridFunction u = solve_weak(g, 3.0, PotentialSpec{}, unit_load(g), tol);
    CHECK(u.at(127) == doctest::Approx(kPThreeMid).epsilon(1e-3));
  }
  SUBCASE("p = 1.5 singular diffusion") {
    GridFunction u = solve_weak(g, 1.5, PotentialSpec{}, unit_load(g), tol);
    CHECK(u.at(127) == doctest::Approx(kPHalfMid).epsilon(1e-3));
  }
}

TEST_CASE("solutions scale like c^{1/(p-1)} in the load for zero potential") {
  Grid g = Grid::interval(63);
  for (double p : {1.5, 2.0, 3.0}) {
    CAPTURE(p);
    GridFunction u1 = solve_weak(g, p, PotentialSpec{}, unit_load(g), 1e-11);
    GridFunction u10 =
        solve_weak(g, p, PotentialSpec{}, GridFunction::constant(g, 10.0), 1e-11);
    const double expected = std::pow(10.0, 1.0 / (p - 1.0));
    CHECK(u10.max_abs() / u1.max_abs() == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("a nonnegative potential pushes the solution down") {
  Grid g = Grid::interval(63);
  PotentialSpec damped;
  damped.kind = "const";
  damped.c0 = 4.0;
  damped.m1 = 1.5;
  for (double p : {2.0, 2.5}) {
    CAPTURE(p);
    GridFunction free_u = solve_weak(g, p, PotentialSpec{}, unit_load(g), 1e-10);
    GridFunction damp_u = solve_weak(g, p, damped, unit_load(g), 1e-10);
    CHECK(damp_u.max_abs() < free_u.max_abs());
    for (int i = 0; i < g.n; ++i) {
      // comparison: 0 <= u_V <= u_0 pointwise
      REQUIRE(damp_u.at(i) >= -1e-12);
      REQUIRE(damp_u.at(i) <= free_u.at(i) + 1e-12);
    }
  }
}

TEST_CASE("2-D unit-square torsion value matches the frozen reference") {
  Grid g = Grid::square(63);
  SolveResult r = solve_weak_detailed(g, 2.0, PotentialSpec{}, unit_load(g), 1e-10);
  CHECK(r.stats.converged);
  // continuum series value u(1/2,1/2) = 0.0736713...; the N = 63 grid sits
  // about 1.9e-4 away, well inside the discretization budget below
  CHECK(r.u.at(31, 31) == doctest::Approx(0.073671352273691156).epsilon(1e-3));
  // energy history from the damped iteration must be nonincreasing
  const auto& eh = r.stats.energy_history;
  REQUIRE(eh.size() >= 2);
  for (std::size_t i = 1; i < eh.size(); ++i) REQUIRE(eh[i] <= eh[i - 1] + 1e-12);
}

TEST_CASE("disk mask stays inside the square and is connected") {
  Grid d = Grid::disk(41, 0.45);
  CHECK_NOTHROW(d.validate());
  CHECK(d.interior_count > 0);
  CHECK(d.interior_count < d.cells());
  // cells outside the radius carry mask 0
  int outside_marked = 0;
  for (int j = 0; j < d.n; ++j)
    for (int i = 0; i < d.n; ++i) {
      const double dx = d.xi(i) - 0.5, dy = d.xi(j) - 0.5;
      if (std::hypot(dx, dy) > 0.45 + d.h && d.mask[d.idx(i, j)]) ++outside_marked;
    }
  CHECK(outside_marked == 0);
  CHECK(d.cell_measure == doctest::Approx(1.0 / d.interior_count));

  // a solve on the disk stays positive inside and respects the mask
  GridFunction u = solve_weak(d, 2.0, PotentialSpec{}, unit_load(d), 1e-9);
  for (int j = 0; j < d.n; ++j)
    for (int i = 0; i < d.n; ++i) {
      if (d.in(i, j))
        REQUIRE(u.at(i, j) > 0.0);
      else
        REQUIRE(u.at(i, j) == 0.0);
    }
}

TEST_CASE("monotonicity check certifies ordered loads and rejects non-solutions") {
  Grid g = Grid::interval(127);
  PotentialSpec V;
  V.kind = "const";
  V.c0 = 1.0;
  V.m1 = 2.0;
  for (double p : {2.0, 3.0}) {
    CAPTURE(p);
    GridFunction f1 = GridFunction::constant(g, 2.0);
    GridFunction f2 = unit_load(g);
    GridFunction u1 = solve_weak(g, p, V, f1, 1e-11);
    GridFunction u2 = solve_weak(g, p, V, f2, 1e-11);
    MonotonicityReport rep = monotonicity_check(u1, u2, f1, f2, p, V);
    CHECK(rep.pass);
    CHECK(rep.coercivity_slack >= -1e-9);
    CHECK(rep.v_pairing <= 1e-10);
  }
  // feeding a function that does not solve its equation is refused
  GridFunction f = unit_load(g);
  GridFunction u = solve_weak(g, 2.0, V, f, 1e-11);
  GridFunction junk = GridFunction::constant(g, 0.25);
  junk.enforce_mask();
  CHECK_THROWS_WITH_AS(monotonicity_check(u, junk, f, f, 2.0, V),
                       "monotonicity check refused: inputs do not solve their weak equations",
                       spec_error);
  // the chain is only claimed for p >= 2
  CHECK_THROWS_AS(monotonicity_check(u, u, f, f, 1.5, V), spec_error);
}

TEST_CASE("truncation clamps values and fixes small functions") {
  CHECK(truncate(3.0, 2.0) == 2.0);
  CHECK(truncate(-3.0, 2.0) == -2.0);
  CHECK(truncate(1.5, 2.0) == 1.5);
  CHECK_THROWS_AS(truncate(1.0, 0.0), spec_error);

  Grid g = Grid::interval(15);
  GridFunction u = solve_weak(g, 2.0, PotentialSpec{}, unit_load(g), 1e-10);
  GridFunction cut = truncate(u, 0.06);
  CHECK(cut.max_abs() == doctest::Approx(0.06));
  GridFunction same = truncate(u, 10.0);
  for (int i = 0; i < g.n; ++i) REQUIRE(same.at(i) == u.at(i));
}

TEST_CASE("gradient field views cover the interior with unit mass") {
  Grid g = Grid::square(21);
  GridFunction u = solve_weak(g, 2.0, PotentialSpec{}, unit_load(g), 1e-9);
  GradientField du = gradient_of(u);
  SimpleFunction mag = du.magnitude_view();
  CHECK(mag.total_measure() == doctest::Approx(1.0));
  CHECK(du.sup_all_sites >= mag.max_abs() - 1e-12);
  // difference with itself vanishes
  SimpleFunction zero = du.difference_view(du);
  CHECK(zero.max_abs() == 0.0);
  // weak-Lebesgue norm of the gradient is finite and positive
  CHECK(gradient_norm(du, SpaceSpec::lorentz(2.0, kInf)) > 0.0);
}

TEST_CASE("1-D torsion gradient has the exact weak-L2 norm") {
  // |u'| = |1/2 - x| rearranges to (1/2)(1 - s); sup_s s^{1/2} (1/2)(1 - s)
  // is attained at s = 1/3 with value 1/(3 sqrt 3).
  Grid g = Grid::interval(511);
  GridFunction u = solve_weak(g, 2.0, PotentialSpec{}, unit_load(g), 1e-11);
  GradientField du = gradient_of(u);
  CHECK(gradient_norm(du, SpaceSpec::lorentz(2.0, kInf)) ==
        doctest::Approx(1.0 / (3.0 * std::sqrt(3.0))).epsilon(5e-3));
}

TEST_CASE("potential growth window and solver inputs are validated") {
  Grid g = Grid::interval(31);
  PotentialSpec V;
  V.kind = "const";
  V.c0 = 1.0;

  V.m1 = 0.2;  // below p - 1 for p = 2
  CHECK_THROWS_AS(V.validate(2.0, 1), spec_error);
  V.m1 = 100.0;  // beyond the window (p-1)(1 + 1/(n-p)) when p < n
  CHECK_THROWS_AS(V.validate(1.5, 2), spec_error);
  V.m1 = 1.0;
  CHECK_NOTHROW(V.validate(1.5, 2));
  V.m1 = 100.0;  // p >= n has no Sobolev cap: any polynomial growth is fine
  CHECK_NOTHROW(V.validate(2.0, 2));

  PotentialSpec bad;
  bad.kind = "wiggle";
  CHECK_THROWS_AS(bad.validate(2.0, 1), spec_error);
  PotentialSpec neg;
  neg.kind = "const";
  neg.c0 = -1.0;
  CHECK_THROWS_AS(neg.validate(2.0, 1), spec_error);

  CHECK_THROWS_AS(solve_weak(g, 1.0, PotentialSpec{}, unit_load(g), 1e-8), spec_error);
  CHECK_THROWS_AS(solve_weak(g, 2.0, PotentialSpec{}, unit_load(g), 0.0), spec_error);
  Grid other = Grid::interval(15);
  CHECK_THROWS_AS(solve_weak(g, 2.0, PotentialSpec{}, unit_load(other), 1e-8), spec_error);
  CHECK_THROWS_AS(Grid::interval(0), spec_error);
}

TEST_CASE("grid and grid-function JSON round trips") {
  Grid d = Grid::disk(17);
  nlohmann::json j = d;
  Grid back = j.get<Grid>();
  CHECK(back.dimension == d.dimension);
  CHECK(back.n == d.n);
  CHECK(back.mask == d.mask);
  CHECK(back.interior_count == d.interior_count);

  GridFunction u = solve_weak(d, 2.0, PotentialSpec{}, unit_load(d), 1e-8);
  nlohmann::json ju = u;
  GridFunction ub = ju.get<GridFunction>();
  CHECK(ub.values == u.values);

  PotentialSpec V;
  V.kind = "bump";
  V.c0 = 2.0;
  V.m1 = 1.25;
  V.center = {0.3, 0.6};
  V.width = 0.1;
  nlohmann::json jv = V;
  PotentialSpec vb = jv.get<PotentialSpec>();
  CHECK(vb.kind == "bump");
  CHECK(vb.c0 == 2.0);
  CHECK(vb.center[1] == 0.6);
}

TEST_CASE("exponent helpers agree with their defining formulas") {
  CHECK(n_prime(2) == doctest::Approx(2.0));
  CHECK(n_prime(3) == doctest::Approx(1.5));
  CHECK(p_star(1.5, 2) == doctest::Approx(6.0));
  CHECK(p_star_conj(3.0, 2) == doctest::Approx(6.0 / 7.0));
  // (p*)' and p* are Hölder conjugate when both exist
  const double ps = p_star(1.5, 2), psc = p_star_conj(1.5, 2);
  CHECK(1.0 / ps + 1.0 / psc == doctest::Approx(1.0));
  CHECK(h3_exponent_cap(1.5, 2) == doctest::Approx(0.5 * (1.0 + 2.0)));
  CHECK_THROWS_AS(p_star(2.0, 2), spec_error);   // needs p < n
  CHECK_THROWS_AS(h3_exponent_cap(2.0, 2), spec_error);
  CHECK(n_prime(1) == kInf);
  CHECK_THROWS_AS(n_prime(0), spec_error);
}
