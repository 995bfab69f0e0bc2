#include <algorithm>
#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <cmath>

#include "contactmoc/error.hpp"
#include "contactmoc/geometry_config.hpp"

namespace contactmoc {

struct WallCurve::Spline {
  boost::math::interpolators::cardinal_quintic_b_spline<double> s;
  double x0, x1, h;
};

WallCurve WallCurve::from_expression(Expression e) {
  WallCurve w;
  w.expr_ = std::move(e);
  return w;
}

WallCurve WallCurve::from_samples(std::vector<double> x, std::vector<double> g) {
  if (x.size() != g.size() || x.size() < 8)
    throw Error(ErrorKind::Parse, "sampled wall needs at least 8 (x, g) rows");
  const double h = (x.back() - x.front()) / double(x.size() - 1);
  if (!(h > 0.0)) throw Error(ErrorKind::Parse, "sampled wall abscissae must increase");
  for (std::size_t k = 0; k < x.size(); ++k)
    if (std::abs(x[k] - (x.front() + double(k) * h)) > 1e-9 * std::max(1.0, std::abs(x.back())))
      throw Error(ErrorKind::Parse, "sampled wall abscissae must be uniformly spaced");
  WallCurve w;
  w.spline_ = std::make_shared<Spline>(
      Spline{boost::math::interpolators::cardinal_quintic_b_spline<double>(g, x.front(), h), x.front(), x.back(), h});
  w.xs_ = std::move(x);
  w.gs_ = std::move(g);
  return w;
}

std::array<double, 4> WallCurve::derivatives(double x) const {
  if (expr_.valid()) return expr_.derivatives(x);
  if (!spline_) throw Error(ErrorKind::Internal, "empty wall curve");
  const auto& sp = *spline_;
  x = std::clamp(x, sp.x0, sp.x1);
  const double d = 0.125 * sp.h;
  const double a = std::max(sp.x0, x - d), b = std::min(sp.x1, x + d);
  return {sp.s(x), sp.s.prime(x), sp.s.double_prime(x), (sp.s.double_prime(b) - sp.s.double_prime(a)) / (b - a)};
}

WallCurve WallCurve::scaled_about(double base, double t) const {
  if (expr_.valid()) {
    const std::string b = fmt17(base);
    return from_expression(Expression::parse(b + " + " + fmt17(t) + "*((" + expr_.source() + ") - (" + b + "))",
                                             expr_.variable()));
  }
  std::vector<double> g = gs_;
  for (double& v : g) v = base + t * (v - base);
  return from_samples(xs_, g);
}

void LayerProfile::build() {
  const auto& t = table;
  if (t.y.size() < 2) throw Error(ErrorKind::Parse, "inlet layer needs at least two samples");
  u = MonotoneCubic(t.y, t.u);
  v = MonotoneCubic(t.y, t.v);
  p = MonotoneCubic(t.y, t.p);
  rho = MonotoneCubic(t.y, t.rho);
}

LayerTable tabulate_generator(const LayerGenerator& gen, double y_lo, double y_hi, const PrimitiveState& bg,
                              const GasConstants& g) {
  if (gen.samples < 4) throw Error(ErrorKind::Parse, "inlet generator needs samples >= 4");
  const double A_bg = entropy_function(bg, g), B_bg = bernoulli(bg, g);
  LayerTable t;
  const int n = gen.samples;
  for (int k = 0; k < n; ++k) {
    const double y = k == n - 1 ? y_hi : y_lo + (y_hi - y_lo) * double(k) / double(n - 1);
    const double p = gen.p(y), w = gen.w(y);
    const double A = gen.A ? (*gen.A)(y) : A_bg;
    const double B = gen.B ? (*gen.B)(y) : B_bg;
    if (!(p > 0.0) || !(A > 0.0))
      throw Error(ErrorKind::InvariantViolation, "inlet generator gives nonpositive p or A at y=" + fmt17(y));
    const double rho = density_from_entropy(p, A, g);
    const double kinetic = B - g.gamma / (g.gamma - 1.0) * p / rho;
    if (!(kinetic > 0.0))
      throw Error(ErrorKind::InvariantViolation, "inlet generator leaves no kinetic energy at y=" + fmt17(y));
    const double u = std::sqrt(2.0 * kinetic / (1.0 + w * w));
    t.y.push_back(y);
    t.u.push_back(u);
    t.v.push_back(w * u);
    t.p.push_back(p);
    t.rho.push_back(rho);
  }
  return t;
}

InversionOptions RunConfig::inversion() const {
  InversionOptions o;
  o.newton_tol = newton_tol;
  o.max_newton_iters = max_newton_iters;
  o.sonic_margin = sonic_margin;
  return o;
}

const NozzleGeometry& Config::nozzle() const {
  if (!geometry) throw Error(ErrorKind::Parse, "config has no [geometry] section");
  return *geometry;
}
const InletProfile& Config::inlet_profile() const {
  if (!inlet) throw Error(ErrorKind::Parse, "config has no [inlet.a]/[inlet.b] sections");
  return *inlet;
}
const Background& Config::background_state() const {
  if (!background) throw Error(ErrorKind::Parse, "config has no [background] section");
  return *background;
}
const BlowupSettings& Config::blowup_settings() const {
  if (!blowup) throw Error(ErrorKind::Parse, "config has no [blowup] section");
  return *blowup;
}

std::vector<std::string> validate_compatibility(const InletProfile& profile, const NozzleGeometry& geom, double tol) {
  std::vector<std::string> out;
  const PrimitiveState a0 = profile.a.at(0.0), b0 = profile.b.at(0.0);
  const double wa = a0.v / a0.u, wb = b0.v / b0.u;
  if (std::abs(wa - wb) > tol)
    out.push_back("direction mismatch: (v/u) at y=0 is " + fmt17(wa) + " above and " + fmt17(wb) + " below");
  if (std::abs(a0.p - b0.p) > tol)
    out.push_back("pressure mismatch: p at y=0 is " + fmt17(a0.p) + " above and " + fmt17(b0.p) + " below");
  const PrimitiveState top = profile.a.at(profile.a.y_hi());
  const double gp = geom.upper.slope(0.0);
  if (std::abs(top.v / top.u - gp) > tol)
    out.push_back("corner slip (upper wall): v/u=" + fmt17(top.v / top.u) + " but g_plus'(0)=" + fmt17(gp));
  const PrimitiveState bot = profile.b.at(profile.b.y_lo());
  const double gm = geom.lower.slope(0.0);
  if (std::abs(bot.v / bot.u - gm) > tol)
    out.push_back("corner slip (lower wall): v/u=" + fmt17(bot.v / bot.u) + " but g_minus'(0)=" + fmt17(gm));
  return out;
}

namespace {

double layer_c2_norm(const LayerProfile& layer, const PrimitiveState& bg, int samples) {
  const MonotoneCubic* comps[4] = {&layer.u, &layer.v, &layer.p, &layer.rho};
  const double base[4] = {bg.u, bg.v, bg.p, bg.rho};
  double sup[3] = {0, 0, 0};
  for (int k = 0; k <= samples; ++k) {
    const double y = layer.y_lo() + (layer.y_hi() - layer.y_lo()) * double(k) / double(samples);
    for (int c = 0; c < 4; ++c) {
      sup[0] = std::max(sup[0], std::abs((*comps[c])(y) - base[c]));
      sup[1] = std::max(sup[1], std::abs(comps[c]->derivative(y)));
      sup[2] = std::max(sup[2], std::abs(comps[c]->second_derivative(y)));
    }
  }
  return sup[0] + sup[1] + sup[2];
}

double wall_c3_norm(const WallCurve& w, double base, double length, int samples) {
  double sup[4] = {0, 0, 0, 0};
  for (int k = 0; k <= samples; ++k) {
    auto d = w.derivatives(length * double(k) / double(samples));
    d[0] -= base;
    for (int j = 0; j < 4; ++j) sup[j] = std::max(sup[j], std::abs(d[j]));
  }
  return sup[0] + sup[1] + sup[2] + sup[3];
}

}  // namespace

double perturbation_size(const InletProfile& profile, const NozzleGeometry& geom, const Background& background,
                         int samples) {
  return layer_c2_norm(profile.a, background.a, samples) + layer_c2_norm(profile.b, background.b, samples) +
         wall_c3_norm(geom.upper, 1.0, geom.length, samples) + wall_c3_norm(geom.lower, -1.0, geom.length, samples);
}

namespace {

Expression scaled_expr(const Expression& e, double base, double t) {
  const std::string b = fmt17(base);
  return Expression::parse(b + " + " + fmt17(t) + "*((" + e.source() + ") - (" + b + "))", e.variable());
}

void scale_layer(LayerProfile& layer, const PrimitiveState& bg, double t, const GasConstants& g) {
  if (layer.generator) {
    LayerGenerator& gen = *layer.generator;
    gen.p = scaled_expr(gen.p, bg.p, t);
    gen.w = scaled_expr(gen.w, 0.0, t);
    if (gen.A) gen.A = scaled_expr(*gen.A, entropy_function(bg, g), t);
    if (gen.B) gen.B = scaled_expr(*gen.B, bernoulli(bg, g), t);
    layer.table = tabulate_generator(gen, layer.y_lo(), layer.y_hi(), bg, g);
  } else {
    auto& tb = layer.table;
    for (std::size_t k = 0; k < tb.y.size(); ++k) {
      tb.u[k] = bg.u + t * (tb.u[k] - bg.u);
      tb.v[k] = bg.v + t * (tb.v[k] - bg.v);
      tb.p[k] = bg.p + t * (tb.p[k] - bg.p);
      tb.rho[k] = bg.rho + t * (tb.rho[k] - bg.rho);
    }
  }
  layer.build();
}

}  // namespace

Config scale_deviation(const Config& cfg, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "deviation scale must be nonnegative");
  Config out = cfg;
  if (out.geometry) {
    out.geometry->upper = out.geometry->upper.scaled_about(1.0, t);
    out.geometry->lower = out.geometry->lower.scaled_about(-1.0, t);
  }
  if (out.inlet) {
    const Background& bg = cfg.background_state();
    scale_layer(out.inlet->a, bg.a, t, cfg.run.gas());
    scale_layer(out.inlet->b, bg.b, t, cfg.run.gas());
  }
  if (out.blowup) {
    BlowupSettings& b = *out.blowup;
    b.u0 = scaled_expr(b.u0, b.u_background, t);
    b.v0 = scaled_expr(b.v0, 0.0, t);
    b.rho0 = scaled_expr(b.rho0, b.rho_background, t);
  }
  return out;
}

}  // namespace contactmoc
