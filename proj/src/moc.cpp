#include "contactmoc/moc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "contactmoc/error.hpp"
#include "contactmoc/parallel.hpp"

namespace contactmoc {

namespace {

struct LayerView {
  int n = 0;
  double lo = 0, hi = 0, h = 0;
  double eta(int k) const { return k == n ? hi : lo + k * h; }
};

LayerView view(const LagrangianDomain& d, Layer layer) {
  if (layer == Layer::A) return {d.neta_a, 0.0, d.m_a, d.deta_a()};
  return {d.neta_b, -d.m_b, 0.0, d.deta_b()};
}

const char* name(Layer l) { return l == Layer::A ? "a" : "b"; }

const std::vector<double>& lambda_row_source(const FrozenField& f, Layer l, Family fam) {
  const LayerLambdas& ll = l == Layer::A ? f.a : f.b;
  return fam == Family::Plus ? ll.plus : ll.minus;
}

// Linear interpolation of one lattice row in eta, clamped to the row.
double row_linear(const double* row, const LayerView& v, double eta) {
  double s = (eta - v.lo) / v.h;
  if (s <= 0.0) return row[0];
  if (s >= v.n) return row[v.n];
  int k = int(s);
  if (k >= v.n) k = v.n - 1;
  const double t = s - k;
  return (1.0 - t) * row[k] + t * row[k + 1];
}

double bilinear(const FrozenField& f, Layer l, Family fam, double xi, double eta) {
  const LagrangianDomain& d = f.domain;
  const LayerView v = view(d, l);
  const auto& data = lambda_row_source(f, l, fam);
  const std::size_t stride = std::size_t(v.n) + 1;
  double s = xi / d.dxi();
  s = std::clamp(s, 0.0, double(d.nxi));
  int i = std::min(int(s), d.nxi - 1);
  const double t = s - i;
  const double l0 = row_linear(&data[i * stride], v, eta);
  const double l1 = row_linear(&data[(i + 1) * stride], v, eta);
  return (1.0 - t) * l0 + t * l1;
}

std::string where(Layer l, double xi, double eta) {
  return std::string(" at layer ") + name(l) + ", xi=" + fmt17(xi) + ", eta=" + fmt17(eta);
}

struct Crossing {
  bool crossed = false;
  bool high = false;     // crossed the upper end of the layer's eta range
  double theta = 0;      // crossing xi = xi_j + theta * dxi
};

// Backward trace of one family over one slab. Values at nodes whose feet stay
// in the layer are interpolated; the others are flagged.
void trace_slab(const double* f0, const double* lam0, const double* lam1, const LayerView& v, double dxi,
                Interpolation interp, double xi1, Layer layer, std::vector<double>& out,
                std::vector<Crossing>& cross) {
  const std::size_t m = std::size_t(v.n) + 1;
  std::span<const double> fs(f0, m);
  std::vector<double> slopes;
  if (interp == Interpolation::Monotone) {
    slopes.resize(m);
    monotone_slopes_uniform(fs, v.h, slopes);
  }
  const double tiny = 1e-12 * v.h;
  const double width = v.hi - v.lo;
  for (int k = 0; k <= v.n; ++k) {
    const double eta = v.eta(k);
    const double l1 = lam1[k];
    const double eta_half = eta - 0.5 * dxi * l1;
    const double lm = 0.5 * (row_linear(lam0, v, eta_half) + row_linear(lam1, v, eta_half));
    double foot = eta - dxi * lm;
    Crossing c;
    if (foot < v.lo - tiny || foot > v.hi + tiny) {
      if (foot < v.lo - width || foot > v.hi + width)
        throw Error(ErrorKind::CflViolation, "characteristic foot leaves the layer" + where(layer, xi1, eta));
      c.crossed = true;
      c.high = foot > v.hi;
      const double bound = c.high ? v.hi : v.lo;
      const double s = (eta - bound) / (eta - foot);
      c.theta = 1.0 - s;
      out[k] = 0.0;
    } else {
      foot = std::clamp(foot, v.lo, v.hi);
      out[k] = interp == Interpolation::Cubic ? lagrange4_uniform(fs, v.lo, v.h, foot)
                                              : monotone_uniform_clipped(fs, slopes, v.lo, v.h, foot);
    }
    cross[k] = c;
  }
}

void fill_crossings(std::vector<double>& next, const std::vector<Crossing>& cross, const std::vector<double>& cur,
                    int n) {
  for (int k = 0; k <= n; ++k) {
    if (!cross[k].crossed) continue;
    const int kb = cross[k].high ? n : 0;
    if (k == kb) continue;  // boundary node, set by a closure
    const double t = cross[k].theta;
    next[k] = (1.0 - t) * cur[kb] + t * next[kb];
  }
}

}  // namespace

PreparedProblem prepare_problem(const Config& cfg) {
  const NozzleGeometry& geom = cfg.nozzle();
  const InletProfile& inlet = cfg.inlet_profile();
  const GasConstants g = cfg.run.gas();
  const InversionOptions opt = cfg.run.inversion();

  PreparedProblem out;
  out.flux = mass_fluxes(inlet);
  const LagrangianDomain dom =
      make_domain(geom, out.flux, cfg.run.grid_nxi, cfg.run.grid_neta_a, cfg.run.grid_neta_b);
  out.inlet = inlet_to_lagrangian(inlet, out.flux, dom);

  PrimitiveState bg_a, bg_b;
  if (cfg.background) {
    bg_a = cfg.background->a;
    bg_b = cfg.background->b;
  } else {
    bg_a = inlet.a.at(0.0);
    bg_b = inlet.b.at(0.0);
    bg_a.v = bg_b.v = 0.0;
    bg_b.p = bg_a.p;
  }

  MocProblem& p = out.problem;
  p.domain = dom;
  p.geometry = geom;
  p.streams = stream_data_from_inlet(out.inlet, g, bg_a.p, opt);
  p.background_a = bg_a;
  p.background_b = bg_b;
  p.gas = g;
  p.inversion = opt;
  p.min_supersonic_margin = cfg.run.min_supersonic_margin;
  p.interpolation = cfg.run.interpolation;
  p.fp_tol = cfg.run.fp_tol;
  p.max_fp_iters = cfg.run.max_fp_iters;

  auto fill = [&](const std::vector<PrimitiveState>& states, const StreamData& sd, LayerInvariants& z) {
    for (std::size_t k = 0; k < states.size(); ++k) {
      const InvariantPair zz = invariants_from_state(states[k], sd.node(k), g, opt);
      z.zm.push_back(zz.z_minus);
      z.zp.push_back(zz.z_plus);
    }
  };
  fill(out.inlet.a, p.streams.a, p.inlet.a);
  fill(out.inlet.b, p.streams.b, p.inlet.b);
  return out;
}

InvariantGrid background_grid(const LagrangianDomain& dom) {
  InvariantGrid g;
  g.domain = dom;
  const std::size_t na = std::size_t(dom.nxi + 1) * (dom.neta_a + 1);
  const std::size_t nb = std::size_t(dom.nxi + 1) * (dom.neta_b + 1);
  g.a.zm.assign(na, 0.0);
  g.a.zp.assign(na, 0.0);
  g.b.zm.assign(nb, 0.0);
  g.b.zp.assign(nb, 0.0);
  return g;
}

PrimitiveGrid invert_grid(const InvariantGrid& grid, const MocProblem& prob, const PrimitiveGrid* guess) {
  const LagrangianDomain& d = grid.domain;
  PrimitiveGrid out;
  out.domain = d;
  auto run = [&](Layer l, const LayerInvariants& z, const StreamData& sd, const std::vector<PrimitiveState>* gs,
                 std::vector<PrimitiveState>& dst) {
    const LayerView v = view(d, l);
    const std::size_t stride = std::size_t(v.n) + 1;
    dst.resize(z.zm.size());
    parallel_for(dst.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t idx = b; idx < e; ++idx) {
        const int k = int(idx % stride);
        std::optional<double> start;
        if (gs) start = (*gs)[idx].p;
        try {
          dst[idx] = state_from_invariants({z.zm[idx], z.zp[idx]}, sd.node(k), prob.gas, prob.inversion, start);
        } catch (const Error& e) {
          throw Error(e.kind(), e.what() + where(l, d.xi(int(idx / stride)), v.eta(k)));
        }
      }
    });
  };
  run(Layer::A, grid.a, prob.streams.a, guess ? &guess->a : nullptr, out.a);
  run(Layer::B, grid.b, prob.streams.b, guess ? &guess->b : nullptr, out.b);
  return out;
}

void check_supersonic_margin(const PrimitiveGrid& states, const GasConstants& g, double margin) {
  const LagrangianDomain& d = states.domain;
  auto scan = [&](Layer l, const std::vector<PrimitiveState>& s) {
    const LayerView v = view(d, l);
    const std::size_t stride = std::size_t(v.n) + 1;
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
      const double gap = s[idx].u - sound_speed(s[idx], g);
      if (!(gap >= margin))
        throw Error(ErrorKind::LeftSupersonicRegime,
                    "u - c = " + fmt17(gap) + " below " + fmt17(margin) +
                        where(l, d.xi(int(idx / stride)), v.eta(int(idx % stride))));
    }
  };
  scan(Layer::A, states.a);
  scan(Layer::B, states.b);
}

FrozenField frozen_lambdas(const PrimitiveGrid& states, const GasConstants& g) {
  const LagrangianDomain& d = states.domain;
  FrozenField f;
  f.domain = d;
  auto run = [&](Layer l, const std::vector<PrimitiveState>& s, LayerLambdas& out) {
    const LayerView v = view(d, l);
    const std::size_t stride = std::size_t(v.n) + 1;
    out.minus.resize(s.size());
    out.plus.resize(s.size());
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
      try {
        const LambdaPair lp = lambda_pm(s[idx], g);
        out.minus[idx] = lp.minus;
        out.plus[idx] = lp.plus;
      } catch (const Error& e) {
        throw Error(e.kind(), e.what() + where(l, d.xi(int(idx / stride)), v.eta(int(idx % stride))));
      }
    }
  };
  run(Layer::A, states.a, f.a);
  run(Layer::B, states.b, f.b);
  return f;
}

FrozenField frozen_lambdas(const InvariantGrid& prev, const MocProblem& prob) {
  return frozen_lambdas(invert_grid(prev, prob), prob.gas);
}

CouplingCoefficients coupling_coefficients(const PrimitiveGrid& prev, const MocProblem& prob) {
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const LagrangianDomain& d = prev.domain;
  const GasConstants& g = prob.gas;
  const double p_ref = prob.streams.a.p_ref();
  const StreamPoint sp_a = prob.streams.a.node(0);
  const StreamPoint sp_b = prob.streams.b.node(std::size_t(d.neta_b));
  const StreamPoint bg_a{entropy_function(prob.background_a, g), bernoulli(prob.background_a, g), p_ref};
  const StreamPoint bg_b{entropy_function(prob.background_b, g), bernoulli(prob.background_b, g), p_ref};

  // Background invariants at the contact and the four-term pressure offset.
  const InvariantPair zbar_a = invariants_from_state(prob.background_a, bg_a, g, prob.inversion);
  const InvariantPair zbar_b = invariants_from_state(prob.background_b, bg_b, g, prob.inversion);
  const double c = pressure_from_invariants(zbar_a, bg_a, g, prob.inversion) -
                   pressure_from_invariants(zbar_a, sp_a, g, prob.inversion) +
                   pressure_from_invariants(zbar_b, sp_b, g, prob.inversion) -
                   pressure_from_invariants(zbar_b, bg_b, g, prob.inversion);

  const double pbar_a = prob.background_a.p, pbar_b = prob.background_b.p;
  auto averaged = [&](const StreamPoint& sp, double pbar, double p, double xi) {
    try {
      const double mean = Gauss::integrate([&](double t) { return dtheta_dp(pbar + t * (p - pbar), sp, g); }, 0.0, 1.0);
      return 1.0 / (2.0 * mean);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " in the contact coupling at xi=" + fmt17(xi));
    }
  };

  CouplingCoefficients cc;
  const int n = d.nxi + 1;
  for (auto* v : {&cc.alpha, &cc.beta, &cc.gamma1, &cc.gamma2, &cc.gamma3, &cc.gamma4, &cc.c}) v->resize(n);
  const std::size_t sa = std::size_t(d.neta_a) + 1, sb = std::size_t(d.neta_b) + 1;
  for (int i = 0; i < n; ++i) {
    const double alpha = averaged(sp_a, pbar_a, prev.a[i * sa].p, d.xi(i));
    const double beta = averaged(sp_b, pbar_b, prev.b[i * sb + sb - 1].p, d.xi(i));
    const double s = alpha + beta;
    cc.alpha[i] = alpha;
    cc.beta[i] = beta;
    cc.gamma1[i] = (alpha - beta) / s;
    cc.gamma2[i] = 2.0 * alpha / s;
    cc.gamma3[i] = 2.0 * beta / s;
    cc.gamma4[i] = 1.0 / s;
    cc.c[i] = c;
  }
  return cc;
}

CouplingCoefficients coupling_coefficients(const InvariantGrid& prev, const MocProblem& prob) {
  return coupling_coefficients(invert_grid(prev, prob), prob);
}

CharacteristicPath trace_characteristic(const FrozenField& frozen, Layer layer, Family family, double xi0, double eta0,
                                        double xi_stop) {
  const LagrangianDomain& d = frozen.domain;
  const LayerView v = view(d, layer);
  CharacteristicPath path;
  path.layer = layer;
  path.family = family;
  path.xi.push_back(xi0);
  path.eta.push_back(eta0);
  const double dir = xi_stop >= xi0 ? 1.0 : -1.0;
  const double tiny = 1e-12 * v.h;
  double xi = xi0, eta = eta0;
  while (dir * (xi_stop - xi) > 1e-14 * d.length) {
    const double s = dir * std::min(d.dxi(), dir * (xi_stop - xi));
    const double l1 = bilinear(frozen, layer, family, xi, eta);
    const double lm = bilinear(frozen, layer, family, xi + 0.5 * s, eta + 0.5 * s * l1);
    const double eta_new = eta + s * lm;
    if (eta_new < v.lo - tiny || eta_new > v.hi + tiny) {
      const bool high = eta_new > v.hi;
      const double bound = high ? v.hi : v.lo;
      const double frac = (bound - eta) / (eta_new - eta);
      path.event = (high == (layer == Layer::A)) ? PathEvent::Wall : PathEvent::Contact;
      path.event_xi = xi + frac * s;
      path.event_eta = bound;
      path.xi.push_back(path.event_xi);
      path.eta.push_back(bound);
      break;
    }
    xi += s;
    if (dir * (xi_stop - xi) <= 1e-14 * d.length) xi = xi_stop;
    eta = std::clamp(eta_new, v.lo, v.hi);
    path.xi.push_back(xi);
    path.eta.push_back(eta);
  }
  if (dir > 0) {
    path.foot_xi = xi0;
    path.foot_eta = eta0;
  } else {
    path.foot_xi = path.xi.back();
    path.foot_eta = path.eta.back();
  }
  return path;
}

SlabPair slab(const InvariantGrid& grid, int i) {
  const LagrangianDomain& d = grid.domain;
  auto cut = [&](const LayerInvariants& z, int n) {
    const std::size_t stride = std::size_t(n) + 1, o = std::size_t(i) * stride;
    LayerInvariants s;
    s.zm.assign(z.zm.begin() + o, z.zm.begin() + o + stride);
    s.zp.assign(z.zp.begin() + o, z.zp.begin() + o + stride);
    return s;
  };
  return {cut(grid.a, d.neta_a), cut(grid.b, d.neta_b)};
}

SlabPair step_linearized(const SlabPair& cur, int j, const FrozenField& frozen, const MocProblem& prob,
                         const CouplingCoefficients& cc) {
  const LagrangianDomain& d = frozen.domain;
  const LayerView va = view(d, Layer::A), vb = view(d, Layer::B);
  const std::size_t sa = std::size_t(va.n) + 1, sb = std::size_t(vb.n) + 1;
  const double dxi = d.dxi(), xi1 = d.xi(j + 1);

  SlabPair next;
  for (auto* v : {&next.a.zm, &next.a.zp}) v->resize(sa);
  for (auto* v : {&next.b.zm, &next.b.zp}) v->resize(sb);
  std::vector<Crossing> ca_m(sa), ca_p(sa), cb_m(sb), cb_p(sb);

  const double* ap0 = &frozen.a.plus[j * sa];
  const double* am0 = &frozen.a.minus[j * sa];
  const double* bp0 = &frozen.b.plus[j * sb];
  const double* bm0 = &frozen.b.minus[j * sb];
  trace_slab(cur.a.zm.data(), ap0, ap0 + sa, va, dxi, prob.interpolation, xi1, Layer::A, next.a.zm, ca_m);
  trace_slab(cur.a.zp.data(), am0, am0 + sa, va, dxi, prob.interpolation, xi1, Layer::A, next.a.zp, ca_p);
  trace_slab(cur.b.zm.data(), bp0, bp0 + sb, vb, dxi, prob.interpolation, xi1, Layer::B, next.b.zm, cb_m);
  trace_slab(cur.b.zp.data(), bm0, bm0 + sb, vb, dxi, prob.interpolation, xi1, Layer::B, next.b.zp, cb_p);

  auto require_inside = [&](const Crossing& c, const char* what) {
    if (c.crossed)
      throw Error(ErrorKind::Degenerate, std::string("incoming characteristic leaves the domain at the ") + what +
                                             ", xi=" + fmt17(xi1));
  };
  require_inside(ca_m[va.n], "upper wall");
  require_inside(cb_p[0], "lower wall");
  require_inside(ca_p[0], "contact (layer a)");
  require_inside(cb_m[vb.n], "contact (layer b)");

  const double tp = 2.0 * std::atan(prob.geometry.upper.slope(xi1));
  const double tm = 2.0 * std::atan(prob.geometry.lower.slope(xi1));
  next.a.zp[va.n] = tp - next.a.zm[va.n];
  next.b.zm[0] = tm - next.b.zp[0];

  const int i = j + 1;
  const double zpa = next.a.zp[0], zmb = next.b.zm[vb.n];
  next.a.zm[0] = cc.gamma1[i] * zpa + cc.gamma3[i] * zmb + cc.gamma4[i] * cc.c[i];
  next.b.zp[vb.n] = cc.gamma2[i] * zpa - cc.gamma1[i] * zmb + cc.gamma4[i] * cc.c[i];

  fill_crossings(next.a.zm, ca_m, cur.a.zm, va.n);
  fill_crossings(next.a.zp, ca_p, cur.a.zp, va.n);
  fill_crossings(next.b.zm, cb_m, cur.b.zm, vb.n);
  fill_crossings(next.b.zp, cb_p, cur.b.zp, vb.n);
  return next;
}

InvariantGrid solve_linearized(const FrozenField& frozen, const CouplingCoefficients& cc, const MocProblem& prob) {
  const LagrangianDomain& d = frozen.domain;
  if (!(d == prob.domain)) throw Error(ErrorKind::LatticeMismatch, "frozen field and problem lattices differ");
  InvariantGrid grid = background_grid(d);
  const std::size_t sa = std::size_t(d.neta_a) + 1, sb = std::size_t(d.neta_b) + 1;
  auto put = [&](const SlabPair& s, int i) {
    std::copy(s.a.zm.begin(), s.a.zm.end(), grid.a.zm.begin() + i * sa);
    std::copy(s.a.zp.begin(), s.a.zp.end(), grid.a.zp.begin() + i * sa);
    std::copy(s.b.zm.begin(), s.b.zm.end(), grid.b.zm.begin() + i * sb);
    std::copy(s.b.zp.begin(), s.b.zp.end(), grid.b.zp.begin() + i * sb);
  };
  SlabPair cur = prob.inlet;
  put(cur, 0);
  for (int j = 0; j < d.nxi; ++j) {
    cur = step_linearized(cur, j, frozen, prob, cc);
    put(cur, j + 1);
  }
  return grid;
}

InvariantGrid solve_linearized(const InvariantGrid& prev, const MocProblem& prob) {
  const PrimitiveGrid states = invert_grid(prev, prob);
  return solve_linearized(frozen_lambdas(states, prob.gas), coupling_coefficients(states, prob), prob);
}

GridGaps grid_gaps(const InvariantGrid& x, const InvariantGrid& y) {
  const LagrangianDomain& d = x.domain;
  if (!(d == y.domain)) throw Error(ErrorKind::LatticeMismatch, "grids on different lattices");
  double c0 = 0, dx = 0, de = 0;
  auto scan = [&](const std::vector<double>& p, const std::vector<double>& q, const LayerView& v) {
    const std::size_t stride = std::size_t(v.n) + 1;
    for (int i = 0; i <= d.nxi; ++i)
      for (int k = 0; k <= v.n; ++k) {
        const std::size_t idx = i * stride + k;
        const double diff = p[idx] - q[idx];
        c0 = std::max(c0, std::abs(diff));
        if (i < d.nxi) dx = std::max(dx, std::abs((p[idx + stride] - q[idx + stride]) - diff) / d.dxi());
        if (k < v.n) de = std::max(de, std::abs((p[idx + 1] - q[idx + 1]) - diff) / v.h);
      }
  };
  const LayerView va = view(d, Layer::A), vb = view(d, Layer::B);
  scan(x.a.zm, y.a.zm, va);
  scan(x.a.zp, y.a.zp, va);
  scan(x.b.zm, y.b.zm, vb);
  scan(x.b.zp, y.b.zp, vb);
  return {c0, c0 + dx + de};
}

namespace {

double contact_defect(const InvariantGrid& z, const CouplingCoefficients& cc) {
  const LagrangianDomain& d = z.domain;
  const std::size_t sa = std::size_t(d.neta_a) + 1, sb = std::size_t(d.neta_b) + 1;
  double worst = 0;
  for (int i = 0; i <= d.nxi; ++i) {
    const double zma = z.a.zm[i * sa], zpa = z.a.zp[i * sa];
    const double zmb = z.b.zm[i * sb + sb - 1], zpb = z.b.zp[i * sb + sb - 1];
    const double r1 = zma - (cc.gamma1[i] * zpa + cc.gamma3[i] * zmb + cc.gamma4[i] * cc.c[i]);
    const double r2 = zpb - (cc.gamma2[i] * zpa - cc.gamma1[i] * zmb + cc.gamma4[i] * cc.c[i]);
    worst = std::max({worst, std::abs(r1), std::abs(r2)});
  }
  return worst;
}

}  // namespace

ResidualReport residual_check(const InvariantGrid& grid, const MocProblem& prob) {
  const LagrangianDomain& d = grid.domain;
  const PrimitiveGrid states = invert_grid(grid, prob);
  const FrozenField lam = frozen_lambdas(states, prob.gas);
  ResidualReport r;
  double sum = 0;
  std::size_t count = 0;
  auto transport = [&](Layer l, const LayerInvariants& z, const LayerLambdas& ll) {
    const LayerView v = view(d, l);
    const std::size_t s = std::size_t(v.n) + 1;
    for (int i = 1; i <= d.nxi; ++i)
      for (int k = 1; k < v.n; ++k) {
        const std::size_t idx = i * s + k;
        auto upwind = [&](const std::vector<double>& f, double speed) {
          const double dd = speed > 0 ? (f[idx] - f[idx - 1]) / v.h : (f[idx + 1] - f[idx]) / v.h;
          return (f[idx] - f[idx - s]) / d.dxi() + speed * dd;
        };
        for (const double res : {std::abs(upwind(z.zm, ll.plus[idx])), std::abs(upwind(z.zp, ll.minus[idx]))}) {
          sum += res;
          ++count;
          if (res > r.sup_transport) {
            r.sup_transport = res;
            r.argmax_layer = name(l);
            r.argmax_i = i;
            r.argmax_k = k;
          }
        }
      }
  };
  transport(Layer::A, grid.a, lam.a);
  transport(Layer::B, grid.b, lam.b);
  r.mean_transport = count ? sum / double(count) : 0.0;

  const std::size_t sa = std::size_t(d.neta_a) + 1, sb = std::size_t(d.neta_b) + 1;
  for (int i = 0; i <= d.nxi; ++i) {
    const double x = d.xi(i);
    const double gp = prob.geometry.upper.slope(x), gm = prob.geometry.lower.slope(x);
    const std::size_t top = i * sa + sa - 1, bottom = i * sb;
    const PrimitiveState& st = states.a[top];
    const PrimitiveState& sbtm = states.b[bottom];
    r.wall_slip = std::max({r.wall_slip, std::abs(st.v / st.u - gp), std::abs(sbtm.v / sbtm.u - gm)});
    r.wall_closure = std::max({r.wall_closure, std::abs(grid.a.zm[top] + grid.a.zp[top] - 2.0 * std::atan(gp)),
                               std::abs(grid.b.zm[bottom] + grid.b.zp[bottom] - 2.0 * std::atan(gm))});
    const PrimitiveState& ca = states.a[i * sa];
    const PrimitiveState& cb = states.b[i * sb + sb - 1];
    r.contact_w_jump = std::max(r.contact_w_jump, std::abs(ca.v / ca.u - cb.v / cb.u));
    r.contact_p_jump = std::max(r.contact_p_jump, std::abs(ca.p - cb.p));
  }
  r.closure_gap = contact_defect(grid, coupling_coefficients(states, prob));
  return r;
}

FixedPointResult fixed_point(const MocProblem& prob) {
  FixedPointResult res;
  InvariantGrid z = background_grid(prob.domain);
  PrimitiveGrid states = invert_grid(z, prob);
  check_supersonic_margin(states, prob.gas, prob.min_supersonic_margin);
  CouplingCoefficients cc;
  double prev_c1 = 0;
  for (int n = 1; n <= prob.max_fp_iters; ++n) {
    const FrozenField frozen = frozen_lambdas(states, prob.gas);
    cc = coupling_coefficients(states, prob);
    InvariantGrid next = solve_linearized(frozen, cc, prob);
    const GridGaps gaps = grid_gaps(next, z);
    IterationRow row{n, gaps.c0, gaps.c1, std::numeric_limits<double>::quiet_NaN()};
    if (n > 1) row.ratio = prev_c1 > 0 ? gaps.c1 / prev_c1 : 0.0;
    res.report.rows.push_back(row);
    prev_c1 = gaps.c1;
    states = invert_grid(next, prob, &states);
    check_supersonic_margin(states, prob.gas, prob.min_supersonic_margin);
    z = std::move(next);
    if (gaps.c1 <= prob.fp_tol) {
      res.report.converged = true;
      break;
    }
  }
  const FrozenField final_lambdas = frozen_lambdas(states, prob.gas);
  const double L = prob.domain.length;
  const auto pa = trace_characteristic(final_lambdas, Layer::A, Family::Plus, 0.0, 0.0, L);
  const auto pb = trace_characteristic(final_lambdas, Layer::B, Family::Minus, 0.0, 0.0, L);
  const double none = std::numeric_limits<double>::quiet_NaN();
  res.report.wall_hit_a_plus = pa.event == PathEvent::Wall ? pa.event_xi : none;
  res.report.wall_hit_b_minus = pb.event == PathEvent::Wall ? pb.event_xi : none;
  res.report.contact_closure = contact_defect(z, cc);
  res.report.residuals = residual_check(z, prob);
  res.grid = std::move(z);
  res.states = std::move(states);
  return res;
}

void write_iteration_csv(const IterationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "iter,c0_gap,c1_gap,ratio\n";
  for (const auto& r : report.rows)
    out << r.iter << ',' << fmt17(r.c0_gap) << ',' << fmt17(r.c1_gap) << ',' << fmt17(r.ratio) << '\n';
}

void write_invariants_csv(const InvariantGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const LagrangianDomain& d = grid.domain;
  out << "xi,eta,layer,z_minus,z_plus\n";
  auto dump = [&](Layer l, const LayerInvariants& z) {
    const LayerView v = view(d, l);
    const std::size_t s = std::size_t(v.n) + 1;
    for (int i = 0; i <= d.nxi; ++i)
      for (int k = 0; k <= v.n; ++k)
        out << fmt17(d.xi(i)) << ',' << fmt17(v.eta(k)) << ',' << name(l) << ',' << fmt17(z.zm[i * s + k]) << ','
            << fmt17(z.zp[i * s + k]) << '\n';
  };
  dump(Layer::B, grid.b);
  dump(Layer::A, grid.a);
}

}  // namespace contactmoc
