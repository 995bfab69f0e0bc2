#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "contactmoc/error.hpp"
#include "contactmoc/moc.hpp"
#include "generators.hpp"

using namespace contactmoc;
using contactmoc::testing::Gen;

namespace {

const GasConstants air{1.4};
// Amplitude giving perturbation size 1e-3 for the fixture family.
const double kEps3 = 1e-3 / 141.87718266847165;

MocProblem problem(double amplitude, int nxi = 100, int neta = 25) {
  FixtureOptions o;
  o.amplitude = amplitude;
  o.nxi = nxi;
  o.neta = neta;
  return prepare_problem(make_fixture(o)).problem;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_grid(const InvariantGrid& g) {
  return std::max({sup_abs(g.a.zm), sup_abs(g.a.zp), sup_abs(g.b.zm), sup_abs(g.b.zp)});
}

double sup_diff(const InvariantGrid& x, const InvariantGrid& y) {
  double m = 0;
  auto one = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  };
  one(x.a.zm, y.a.zm);
  one(x.a.zp, y.a.zp);
  one(x.b.zm, y.b.zm);
  one(x.b.zp, y.b.zp);
  return m;
}

FrozenField constant_field(const LagrangianDomain& d, double minus, double plus) {
  FrozenField f;
  f.domain = d;
  const std::size_t na = std::size_t(d.nxi + 1) * (d.neta_a + 1), nb = std::size_t(d.nxi + 1) * (d.neta_b + 1);
  f.a = {std::vector<double>(na, minus), std::vector<double>(na, plus)};
  f.b = {std::vector<double>(nb, minus), std::vector<double>(nb, plus)};
  return f;
}

}  // namespace

TEST_CASE("background speeds are the constant background eigenvalues") {
  const MocProblem p = problem(0.0, 20, 8);
  const FrozenField f = frozen_lambdas(background_grid(p.domain), p);
  const LambdaPair la = lambda_pm(p.background_a, air), lb = lambda_pm(p.background_b, air);
  for (std::size_t k = 0; k < f.a.plus.size(); ++k) {
    CHECK(f.a.plus[k] == doctest::Approx(la.plus).epsilon(1e-14));
    CHECK(f.a.minus[k] == doctest::Approx(la.minus).epsilon(1e-14));
  }
  for (std::size_t k = 0; k < f.b.plus.size(); ++k) CHECK(f.b.plus[k] == doctest::Approx(lb.plus).epsilon(1e-14));
  CHECK(la.plus == doctest::Approx(1.4034840369097417).epsilon(1e-13));
}

TEST_CASE("a perturbed node only changes its own speeds") {
  const MocProblem p = problem(0.0, 20, 8);
  const InvariantGrid bg = background_grid(p.domain);
  InvariantGrid g = bg;
  const std::size_t node = 7 * 9 + 4;
  g.a.zm[node] = 1e-3;
  const FrozenField f0 = frozen_lambdas(bg, p), f1 = frozen_lambdas(g, p);
  for (std::size_t k = 0; k < f0.a.plus.size(); ++k) {
    CHECK((f0.a.plus[k] != f1.a.plus[k]) == (k == node));
    CHECK((f0.a.minus[k] != f1.a.minus[k]) == (k == node));
  }
  CHECK(f0.b.plus == f1.b.plus);
}

TEST_CASE("background coupling coefficients") {
  const MocProblem p = problem(0.0, 20, 8);
  const CouplingCoefficients cc = coupling_coefficients(background_grid(p.domain), p);
  const StreamPoint sa = p.streams.a.node(0), sb = p.streams.b.node(p.streams.b.size() - 1);
  const double alpha = 1.0 / (2.0 * dtheta_dp(1.0, sa, air)), beta = 1.0 / (2.0 * dtheta_dp(1.0, sb, air));
  for (std::size_t i = 0; i < cc.alpha.size(); ++i) {
    CHECK(cc.alpha[i] == doctest::Approx(alpha).epsilon(1e-13));
    CHECK(cc.beta[i] == doctest::Approx(beta).epsilon(1e-13));
    CHECK(cc.c[i] == 0.0);
  }
}

TEST_CASE("coupling coefficient identities on a perturbed iterate") {
  const MocProblem p = problem(0.01, 40, 10);
  const InvariantGrid z1 = solve_linearized(background_grid(p.domain), p);
  const CouplingCoefficients cc = coupling_coefficients(z1, p);
  for (std::size_t i = 0; i < cc.alpha.size(); ++i) {
    CHECK(cc.gamma2[i] - cc.gamma1[i] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cc.gamma1[i] + cc.gamma3[i] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cc.gamma4[i] * (cc.alpha[i] + cc.beta[i]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(cc.c[i]) <= 1e-15);
  }
}

TEST_CASE("constant speeds trace straight lines") {
  const MocProblem p = problem(0.0, 40, 10);
  const FrozenField f = constant_field(p.domain, -0.7, 0.9);
  const CharacteristicPath path = trace_characteristic(f, Layer::A, Family::Plus, 0.0, 0.5, p.domain.length);
  REQUIRE(path.xi.size() > 2);
  for (std::size_t k = 0; k < path.xi.size(); ++k)
    CHECK(path.eta[k] == doctest::Approx(0.5 + 0.9 * path.xi[k]).epsilon(1e-14));
  CHECK(path.event == PathEvent::Wall);
  CHECK(path.event_xi == doctest::Approx((p.domain.m_a - 0.5) / 0.9).epsilon(1e-13));
  const CharacteristicPath down = trace_characteristic(f, Layer::A, Family::Minus, 0.0, 0.5, p.domain.length);
  CHECK(down.event == PathEvent::Contact);
  CHECK(down.event_xi == doctest::Approx(0.5 / 0.7).epsilon(1e-13));
}

TEST_CASE("background wall hit of the plus family") {
  const MocProblem p = problem(0.0, 80, 20);
  const FixedPointResult r = fixed_point(p);
  CHECK(r.report.wall_hit_a_plus == doctest::Approx(p.domain.m_a / 1.4034840369097417).epsilon(1e-10));
  const LambdaPair lb = lambda_pm(p.background_b, air);
  CHECK(r.report.wall_hit_b_minus == doctest::Approx(p.domain.m_b / lb.plus).epsilon(1e-10));
}

TEST_CASE("forward then backward traces return to the start at second order") {
  // Smooth analytic speeds sampled on the lattice; the midpoint rule is
  // reversible up to its own truncation error.
  auto field = [](const LagrangianDomain& d) {
    FrozenField f = constant_field(d, 0.0, 0.0);
    auto fill = [&](LayerLambdas& l, int n, auto eta) {
      for (int i = 0; i <= d.nxi; ++i)
        for (int k = 0; k <= n; ++k) {
          const double x = d.xi(i), e = eta(k);
          const std::size_t idx = std::size_t(i) * (n + 1) + k;
          l.plus[idx] = 0.8 + 0.3 * std::sin(2.0 * e + x);
          l.minus[idx] = -0.8 + 0.3 * std::cos(e - 2.0 * x);
        }
    };
    fill(f.a, d.neta_a, [&](int k) { return d.eta_a(k); });
    fill(f.b, d.neta_b, [&](int k) { return d.eta_b(k); });
    return f;
  };
  std::vector<double> worst;
  for (int m : {1, 2, 4}) {
    const MocProblem p = problem(0.0, 40 * m, 10 * m);
    const FrozenField f = field(p.domain);
    Gen gen(51);
    double w = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const Layer layer = gen.coin() ? Layer::A : Layer::B;
      const Family fam = gen.coin() ? Family::Plus : Family::Minus;
      const double lo = layer == Layer::A ? 0.0 : -p.domain.m_b, hi = layer == Layer::A ? p.domain.m_a : 0.0;
      const double eta0 = gen.uniform(lo + 0.45 * (hi - lo), lo + 0.55 * (hi - lo));
      const double xi0 = 0.1 * gen.integer(0, 10);
      const double xi1 = xi0 + 0.1 * gen.integer(1, 3);
      const CharacteristicPath fw = trace_characteristic(f, layer, fam, xi0, eta0, xi1);
      REQUIRE(fw.event == PathEvent::None);
      const CharacteristicPath bw = trace_characteristic(f, layer, fam, xi1, fw.eta.back(), xi0);
      REQUIRE(bw.event == PathEvent::None);
      CHECK(bw.xi.back() == doctest::Approx(xi0).epsilon(1e-14));
      w = std::max(w, std::abs(bw.eta.back() - eta0));
    }
    worst.push_back(w);
  }
  MESSAGE("reversal errors " << worst[0] << " " << worst[1] << " " << worst[2]);
  CHECK(worst[0] <= 1e-3);
  CHECK(worst[0] / worst[1] >= 3.0);
  CHECK(worst[1] / worst[2] >= 3.0);
}

TEST_CASE("background slab is a fixed point of the step") {
  const MocProblem p = problem(0.0, 20, 8);
  const InvariantGrid bg = background_grid(p.domain);
  const FrozenField f = frozen_lambdas(bg, p);
  const CouplingCoefficients cc = coupling_coefficients(bg, p);
  for (int j : {0, 7, 19}) {
    const SlabPair next = step_linearized(slab(bg, j), j, f, p, cc);
    CHECK(sup_abs(next.a.zm) == 0.0);
    CHECK(sup_abs(next.a.zp) == 0.0);
    CHECK(sup_abs(next.b.zm) == 0.0);
    CHECK(sup_abs(next.b.zp) == 0.0);
  }
}

TEST_CASE("a step with speeds beyond a layer width is a CFL violation") {
  const MocProblem p = problem(0.0, 20, 8);
  const InvariantGrid bg = background_grid(p.domain);
  const FrozenField f = constant_field(p.domain, -1e3, 1e3);
  try {
    step_linearized(slab(bg, 0), 0, f, p, coupling_coefficients(bg, p));
    FAIL("expected a CFL violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CflViolation);
    CHECK(std::string(e.what()).find("xi=") != std::string::npos);
  }
}

TEST_CASE("background march reproduces the background") {
  const MocProblem p = problem(0.0, 40, 10);
  CHECK(sup_grid(solve_linearized(background_grid(p.domain), p)) == 0.0);
}

TEST_CASE("wall closures hold after one perturbed march") {
  const MocProblem p = problem(0.05, 40, 10);
  const InvariantGrid z = solve_linearized(background_grid(p.domain), p);
  const LagrangianDomain& d = p.domain;
  const std::size_t sa = std::size_t(d.neta_a) + 1, sb = std::size_t(d.neta_b) + 1;
  for (int i = 0; i <= d.nxi; ++i) {
    const double x = d.xi(i);
    const std::size_t top = i * sa + sa - 1, bottom = i * sb;
    CHECK(std::abs(z.a.zm[top] + z.a.zp[top] - 2 * std::atan(p.geometry.upper.slope(x))) <= 1e-12);
    CHECK(std::abs(z.b.zm[bottom] + z.b.zp[bottom] - 2 * std::atan(p.geometry.lower.slope(x))) <= 1e-12);
  }
  CHECK(sup_grid(z) > 1e-4);
}

TEST_CASE("iteration map sensitivity to the frozen data scales with the perturbation") {
  const MocProblem p = problem(kEps3, 100, 25);
  const InvariantGrid prev1 = background_grid(p.domain);
  const InvariantGrid prev2 = solve_linearized(prev1, p);
  const double d_in = sup_diff(prev1, prev2);
  const double d_out = sup_diff(solve_linearized(prev1, p), solve_linearized(prev2, p));
  REQUIRE(d_in > 0.0);
  MESSAGE("output/input difference ratio " << d_out / d_in);
  CHECK(d_out / d_in <= 0.05);
}

TEST_CASE("background fixed point converges in one iteration") {
  const MocProblem p = problem(0.0, 40, 10);
  const FixedPointResult r = fixed_point(p);
  CHECK(r.report.converged);
  REQUIRE(r.report.rows.size() == 1);
  CHECK(r.report.rows[0].c1_gap == 0.0);
  CHECK(std::isnan(r.report.rows[0].ratio));
  CHECK(sup_grid(r.grid) == 0.0);
  const ResidualReport res = residual_check(r.grid, p);
  CHECK(res.sup_transport == 0.0);
  CHECK(res.wall_slip == 0.0);
  CHECK(res.contact_w_jump == 0.0);
  CHECK(res.contact_p_jump == 0.0);
  CHECK(res.closure_gap == 0.0);
}

TEST_CASE("perturbed fixed point contracts geometrically") {
  const MocProblem p = problem(kEps3, 100, 25);
  const FixedPointResult r = fixed_point(p);
  CHECK(r.report.converged);
  REQUIRE(r.report.rows.size() >= 2);
  for (std::size_t k = 1; k < r.report.rows.size(); ++k) {
    CHECK(r.report.rows[k].ratio <= 0.6);
    CHECK(r.report.rows[k].c1_gap < r.report.rows[k - 1].c1_gap);
  }
  CHECK(r.report.residuals.wall_slip <= 1e-8);
  CHECK(r.report.residuals.contact_p_jump <= 1e-8);
  CHECK(r.report.residuals.contact_w_jump <= 1e-8);
  CHECK(r.report.contact_closure <= 1e-12);
}

TEST_CASE("transport residual decreases under refinement") {
  double prev = 0;
  for (int m : {1, 2}) {
    const MocProblem p = problem(kEps3, 100 * m, 25 * m);
    const double r = fixed_point(p).report.residuals.sup_transport;
    if (m > 1) CHECK(prev / r >= 1.7);
    prev = r;
  }
}

TEST_CASE("a corrupted node localizes the transport residual") {
  const MocProblem p = problem(kEps3, 60, 16);
  InvariantGrid g = fixed_point(p).grid;
  const int i0 = 30, k0 = 8;
  g.a.zm[std::size_t(i0) * (p.domain.neta_a + 1) + k0] += 1e-4;
  const ResidualReport r = residual_check(g, p);
  CHECK(r.argmax_layer == "a");
  CHECK(std::abs(r.argmax_i - i0) <= 1);
  CHECK(std::abs(r.argmax_k - k0) <= 1);
}

TEST_CASE("monotone and cubic interpolation agree to discretization error") {
  MocProblem p = problem(kEps3, 100, 25);
  const InvariantGrid cubic = fixed_point(p).grid;
  p.interpolation = Interpolation::Monotone;
  const InvariantGrid mono = fixed_point(p).grid;
  CHECK(sup_diff(cubic, mono) <= 0.05 * sup_grid(cubic));
}

TEST_CASE("grid gaps measure sup and difference quotients") {
  const MocProblem p = problem(0.0, 10, 4);
  const InvariantGrid x = background_grid(p.domain);
  InvariantGrid y = x;
  y.b.zp[3 * 5 + 2] = 1e-3;
  const GridGaps g = grid_gaps(x, y);
  CHECK(g.c0 == doctest::Approx(1e-3));
  CHECK(g.c1 > g.c0);
}

TEST_CASE("iteration and invariant csv headers") {
  const MocProblem p = problem(0.0, 10, 4);
  const FixedPointResult r = fixed_point(p);
  const auto dir = std::filesystem::temp_directory_path() / "contactmoc_moc_tests";
  std::filesystem::create_directories(dir);
  write_iteration_csv(r.report, dir / "iterations.csv");
  write_invariants_csv(r.grid, dir / "invariants.csv");
  std::ifstream a(dir / "iterations.csv"), b(dir / "invariants.csv");
  std::string ha, hb;
  std::getline(a, ha);
  std::getline(b, hb);
  CHECK(ha == "iter,c0_gap,c1_gap,ratio");
  CHECK(hb == "xi,eta,layer,z_minus,z_plus");
}
