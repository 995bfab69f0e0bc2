#include <cmath>

#include "contactmoc/geometry_config.hpp"

namespace contactmoc {

namespace {

// "base + c * shape", or just "base" when c vanishes.
std::string term(double base, double c, const std::string& shape) {
  if (c == 0.0) return fmt17(base);
  return fmt17(base) + " + " + fmt17(c) + "*" + shape;
}

}  // namespace

Config make_fixture(const FixtureOptions& opt) {
  Config cfg;
  cfg.run.gamma = opt.gamma;
  cfg.run.grid_nxi = opt.nxi;
  cfg.run.grid_neta_a = opt.neta;
  cfg.run.grid_neta_b = opt.neta;
  const GasConstants g{opt.gamma};
  const double t = opt.amplitude;
  const double L = opt.length;

  NozzleGeometry geom;
  geom.length = L;
  geom.upper = WallCurve::from_expression(
      Expression::parse(term(1.0, 0.5 * t, "sin(pi*x/" + fmt17(2.0 * L) + ")^4"), "x"));
  geom.lower = WallCurve::from_expression(
      Expression::parse(term(-1.0, 0.4 * t, "sin(pi*x/" + fmt17(L) + ")^4"), "x"));
  cfg.geometry = geom;

  Background bg{opt.background_a, opt.background_b};
  bg.a.v = bg.b.v = 0.0;
  bg.b.p = bg.a.p;
  cfg.background = bg;

  InletProfile in;
  LayerGenerator ga;
  ga.p = Expression::parse(term(bg.a.p, 0.5 * t, "sin(pi*y)^2"), "y");
  ga.w = Expression::parse(term(0.0, 0.8 * t, "sin(pi*y)^2*(1 - 0.5*y)"), "y");
  ga.samples = opt.samples;
  LayerGenerator gb;
  gb.p = Expression::parse(term(bg.b.p, -0.3 * t, "sin(pi*y)^2"), "y");
  gb.w = Expression::parse(term(0.0, 0.6 * t, "sin(pi*y)^2*(1 + y)"), "y");
  gb.samples = opt.samples;
  in.a.generator = ga;
  in.a.table = tabulate_generator(ga, 0.0, geom.upper(0.0), bg.a, g);
  in.a.build();
  in.b.generator = gb;
  in.b.table = tabulate_generator(gb, geom.lower(0.0), 0.0, bg.b, g);
  in.b.build();
  cfg.inlet = std::move(in);
  return cfg;
}

Config make_blowup_fixture(double delta, int markers, double dx_max, double x_max) {
  Config cfg;
  BlowupSettings b;
  b.u0 = Expression::parse(fmt17(b.u_background), "y");
  b.v0 = Expression::parse(delta == 0.0 ? std::string("0") : fmt17(delta) + "*sin(pi*y)", "y");
  b.rho0 = Expression::parse(fmt17(b.rho_background), "y");
  b.markers = markers;
  b.dx_max = dx_max;
  b.x_max = x_max;
  cfg.blowup = b;
  return cfg;
}

}  // namespace contactmoc
