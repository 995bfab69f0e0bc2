#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "contactmoc/blowup.hpp"
#include "contactmoc/error.hpp"
#include "generators.hpp"

using namespace contactmoc;
using contactmoc::testing::Gen;

namespace {

const double kGamma = 1.4;

// Prandtl-Meyer angle as a function of the Mach number.
double prandtl_meyer(double M) {
  const double k = (kGamma + 1) / (kGamma - 1);
  return std::sqrt(k) * std::atan(std::sqrt((M * M - 1) / k)) - std::atan(std::sqrt(M * M - 1));
}

double mach(double q, double q_hat) { return q / std::sqrt((kGamma - 1) * (q_hat * q_hat - q * q) / 2); }

IrrotationalModel background_model() {
  const BlowupSettings s = make_blowup_fixture(0.01).blowup_settings();
  return IrrotationalModel::from_settings(s, {kGamma});
}

bool contains(const std::vector<std::string>& list, const std::string& needle) {
  for (const auto& s : list)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

BlowupReport march(double delta, int markers = 200, double dx_max = 0.05, double x_max = 1000.0) {
  const Config cfg = make_blowup_fixture(delta, markers, dx_max, x_max);
  const BlowupSettings& s = cfg.blowup_settings();
  return cauchy_march(PeriodicProfile(s), IrrotationalModel::from_settings(s, {kGamma}), march_options(s));
}

}  // namespace

TEST_CASE("background model constants") {
  const IrrotationalModel m = background_model();
  CHECK(m.q_hat() * m.q_hat() == doctest::Approx(9.84).epsilon(1e-14));
  CHECK(m.critical_speed() == doctest::Approx(m.q_hat() * std::sqrt((kGamma - 1) / (kGamma + 1))).epsilon(1e-14));
  CHECK(m.sound_speed(2.2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pressure-like functional against the Prandtl-Meyer angle") {
  const IrrotationalModel m = background_model();
  CHECK(m.theta(m.q_ref()) == 0.0);
  const double ref = prandtl_meyer(mach(m.q_ref(), m.q_hat()));
  for (double q : {1.9, 2.1, 2.25, 2.6, 3.0}) {
    const double expected = prandtl_meyer(mach(q, m.q_hat())) - ref;
    CHECK(m.theta(q) == doctest::Approx(expected).epsilon(1e-11));
    CHECK(m.theta_fast(q) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(m.speed_from_theta(expected) == doctest::Approx(q).epsilon(1e-9));
  }
  CHECK_THROWS_AS(m.theta(m.critical_speed()), Error);
  CHECK_THROWS_AS(m.theta(m.q_hat()), Error);
}

TEST_CASE("irrotational invariants at the reference and under reflection") {
  const IrrotationalModel m = background_model();
  const IrrotationalState s0 = irrot_invariants({2.2, 0.0, 1.0, 1.0}, m);
  CHECK(s0.z_plus == 0.0);
  CHECK(s0.z_minus == 0.0);
  Gen gen(71);
  for (int k = 0; k < 100; ++k) {
    const PrimitiveState s{gen.uniform(2.0, 2.6), gen.uniform(-0.2, 0.2), 1.0, 1.0};
    const IrrotationalState a = irrot_invariants(s, m);
    const IrrotationalState b = irrot_invariants({s.u, -s.v, s.p, s.rho}, m);
    CHECK(b.z_plus == doctest::Approx(-a.z_minus).epsilon(1e-14));
    CHECK(b.z_minus == doctest::Approx(-a.z_plus).epsilon(1e-14));
    const Velocity v = irrot_velocity(a.z_plus, a.z_minus, m);
    CHECK(v.u == doctest::Approx(s.u).epsilon(1e-9));
    CHECK(v.v == doctest::Approx(s.v).epsilon(1e-9));
  }
}

TEST_CASE("irrotational characteristic speeds") {
  const IrrotationalModel m = background_model();
  const LambdaPair l = irrot_lambdas(2.2, 0.0, m);
  const double c = m.sound_speed(2.2);
  CHECK(l.plus == doctest::Approx(c / std::sqrt(2.2 * 2.2 - c * c)).epsilon(1e-14));
  CHECK(l.minus == -l.plus);
  double prev = 0;
  for (double d : {1e-2, 1e-4, 1e-6}) {
    const double q = m.critical_speed() * (1 + d);
    const double v = irrot_lambdas(q, 0.0, m).plus;
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 1e2);
  CHECK_THROWS_AS(irrot_lambdas(m.critical_speed(), 0.0, m), Error);
}

TEST_CASE("speeds are genuinely nonlinear along each family") {
  const IrrotationalModel m = background_model();
  // lambda_minus carries Z+, so it must vary with Z+ at fixed Z-.
  double prev = 0;
  for (int k = 0; k < 5; ++k) {
    const double zp = 0.01 * k;
    const Velocity v = irrot_velocity(zp, 0.0, m);
    const double lm = irrot_lambdas(v.u, v.v, m).minus;
    if (k > 0) CHECK(lm != doctest::Approx(prev).epsilon(1e-6));
    prev = lm;
  }
}

TEST_CASE("base profile compatibility") {
  BlowupSettings s = make_blowup_fixture(0.0).blowup_settings();
  CHECK(check_compatibility(s, 1e-8).empty());
  s = make_blowup_fixture(0.01).blowup_settings();
  CHECK(check_compatibility(s, 1e-8).empty());
  s.v0 = Expression::parse("0.01*sin(pi*y/2)", "y");
  CHECK(contains(check_compatibility(s, 1e-8), "v at y=1"));
}

TEST_CASE("periodic extension") {
  const BlowupSettings s = make_blowup_fixture(0.01).blowup_settings();
  const PeriodicProfile p(s);
  Gen gen(72);
  for (int k = 0; k < 100; ++k) {
    const double y = gen.uniform(0.0, 1.0);
    CHECK(p.at(-y).v == doctest::Approx(-p.at(y).v).epsilon(1e-13));
    CHECK(p.at(-y).u == p.at(y).u);
    CHECK(p.at(y + 2.0).v == doctest::Approx(p.at(y).v).epsilon(1e-12));
    const double r = PeriodicProfile::reduce(y + 2.0 * gen.integer(-5, 5));
    CHECK(r >= -1.0);
    CHECK(r < 1.0);
  }
}

TEST_CASE("blow-up detector on constructed histories") {
  const std::vector<double> flat(50, 1.0);
  CHECK_FALSE(detect_blowup(flat, 1000.0).has_value());
  std::vector<double> grow;
  for (int k = 0; k < 20; ++k) grow.push_back(std::pow(2.0, k));
  const auto idx = detect_blowup(grow, 1000.0);
  REQUIRE(idx.has_value());
  CHECK(*idx == 10);
  const std::vector<double> zero{0.0, 1.0, 1e9};
  CHECK_FALSE(detect_blowup(zero, 1000.0).has_value());
}

TEST_CASE("constant inflow never blows up") {
  const BlowupReport r = march(0.0, 50, 0.05, 200.0);
  CHECK_FALSE(r.blowup_x.has_value());
  CHECK(r.x_end == doctest::Approx(200.0));
  for (double g : r.max_grad_zp) CHECK(g == 0.0);
  for (double g : r.max_grad_zm) CHECK(g == 0.0);
}

TEST_CASE("sine perturbation blows up and halving the amplitude delays it") {
  const BlowupReport r1 = march(0.01);
  const BlowupReport r2 = march(0.005);
  REQUIRE(r1.blowup_x.has_value());
  REQUIRE(r2.blowup_x.has_value());
  CHECK(*r2.blowup_x > *r1.blowup_x);
  CHECK(*r2.blowup_x / *r1.blowup_x == doctest::Approx(2.0).epsilon(0.1));
  REQUIRE(r1.gradient_x.has_value());
  REQUIRE(r1.crossing_x.has_value());
  CHECK(std::abs(*r1.gradient_x - *r1.crossing_x) <= 0.1 * *r1.blowup_x);
  REQUIRE(r1.trigger.has_value());
}

TEST_CASE("gradient history csv") {
  const BlowupReport r = march(0.01, 50, 0.1, 5.0);
  const auto path = std::filesystem::temp_directory_path() / "contactmoc_blowup_gradients.csv";
  write_gradient_csv(r, path);
  std::ifstream in(path);
  std::string h;
  std::getline(in, h);
  CHECK(h == "x,max_grad_Zp,max_grad_Zm");
  CHECK(r.x.size() == r.max_grad_zp.size());
}
