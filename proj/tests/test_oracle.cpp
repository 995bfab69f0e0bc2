#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "contactmoc/error.hpp"
#include "contactmoc/oracle.hpp"
#include "generators.hpp"

using namespace contactmoc;
using contactmoc::testing::Gen;

namespace {

const GasConstants air{1.4};
const double kEps3 = 1e-3 / 141.87718266847165;

MocProblem problem(double amplitude, int nxi, int neta) {
  FixtureOptions o;
  o.amplitude = amplitude;
  o.nxi = nxi;
  o.neta = neta;
  return prepare_problem(make_fixture(o)).problem;
}

// Advects exp(-200 (x - 0.3)^2) to x = 0.3 + 0.4 with speed 0.8 and CFL 0.5.
double advection_error(int n) {
  const double h = 1.0 / n, speed = 0.8, cfl = 0.5, dt = cfl * h / speed;
  const int steps = int(std::lround(0.5 / dt));
  auto exact = [](double x) { return std::exp(-200.0 * (x - 0.3) * (x - 0.3)); };
  std::vector<double> z(n + 1), out(n + 1), lam(n + 1, speed);
  for (int k = 0; k <= n; ++k) z[k] = exact(k * h);
  for (int s = 0; s < steps; ++s) {
    upwind_update(z, lam, dt, h, out);
    std::swap(z, out);
  }
  const double shift = speed * steps * dt;
  double e = 0;
  for (int k = 0; k <= n; ++k) e = std::max(e, std::abs(z[k] - exact(k * h - shift)));
  return e;
}

}  // namespace

TEST_CASE("upwind update shifts linear data exactly and keeps inflow ends") {
  std::vector<double> z{1, 2, 3, 4, 5}, out(5);
  std::vector<double> pos(5, 0.5), neg(5, -0.5);
  upwind_update(z, pos, 1.0, 1.0, out);
  CHECK(out == std::vector<double>{1, 1.5, 2.5, 3.5, 4.5});
  upwind_update(z, neg, 1.0, 1.0, out);
  CHECK(out == std::vector<double>{1.5, 2.5, 3.5, 4.5, 5});
}

TEST_CASE("upwind update is monotone under the CFL limit") {
  Gen gen(61);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.integer(3, 40);
    std::vector<double> z(n), lam(n), out(n);
    for (int k = 0; k < n; ++k) {
      z[k] = gen.uniform(-1, 1);
      lam[k] = gen.uniform(-1, 1);
    }
    upwind_update(z, lam, 0.9, 1.0, out);
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    for (double v : out) {
      CHECK(v >= *lo - 1e-15);
      CHECK(v <= *hi + 1e-15);
    }
  }
}

TEST_CASE("linear advection converges at first order") {
  const double e1 = advection_error(400), e2 = advection_error(800), e3 = advection_error(1600);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(e2 / e3 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("contact solve recovers a constructed pressure and angle") {
  const StreamPoint sa{1.0, 5.92, 1.0};
  const StreamPoint sb{entropy_function({2.5, 0, 1.0, 1.2}, air), bernoulli({2.5, 0, 1.0, 1.2}, air), 1.0};
  const ContactSolution bg = solve_contact(0.0, 0.0, sa, sb, air, {}, 1.0);
  CHECK(bg.pressure == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(bg.angle) <= 1e-14);
  Gen gen(62);
  for (int k = 0; k < 50; ++k) {
    const double P = gen.uniform(0.8, 1.2), angle = gen.uniform(-0.1, 0.1);
    const double za_plus = angle - theta(P, sa, air), zb_minus = angle + theta(P, sb, air);
    const ContactSolution s = solve_contact(za_plus, zb_minus, sa, sb, air, {}, 1.0);
    CHECK(s.pressure == doctest::Approx(P).epsilon(1e-10));
    CHECK(s.angle == doctest::Approx(angle).epsilon(1e-10));
  }
}

TEST_CASE("background propagates exactly") {
  const MocProblem p = problem(0.0, 40, 10);
  const OracleGrid o = upwind_march(p);
  const DifferenceReport d = compare_fields(background_grid(p.domain), o);
  CHECK(d.sup() == 0.0);
  CHECK(o.max_substeps >= 1);
}

TEST_CASE("field comparison") {
  const MocProblem p = problem(0.0, 10, 4);
  const InvariantGrid g = background_grid(p.domain);
  OracleGrid o{g, 1};
  CHECK(compare_fields(g, o).sup() == 0.0);
  o.grid.b.zm[3 * 5 + 1] = 2.5e-3;
  const DifferenceReport d = compare_fields(g, o);
  CHECK(d.sup() == 2.5e-3);
  CHECK(d.b_minus.sup == 2.5e-3);
  CHECK(d.a_minus.sup == 0.0);
  CHECK(d.b_minus.l1 == doctest::Approx(2.5e-3 * p.domain.dxi() * p.domain.deta_b()));
  const MocProblem q = problem(0.0, 12, 4);
  CHECK_THROWS_AS(compare_fields(background_grid(q.domain), o), Error);
}

TEST_CASE("sub-step limit is reported as a CFL violation") {
  const MocProblem p = problem(kEps3, 40, 40);
  OracleOptions opt;
  opt.max_substeps = 1;
  try {
    upwind_march(p, opt);
    FAIL("expected a CFL violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CflViolation);
  }
}

TEST_CASE("moc and oracle approach each other under refinement") {
  double prev = 0;
  for (int m : {1, 2}) {
    const MocProblem p = problem(kEps3, 200 * m, 50 * m);
    const double d = compare_fields(fixed_point(p).grid, upwind_march(p)).sup();
    if (m > 1) CHECK(prev / d >= 1.5);
    prev = d;
  }
}
