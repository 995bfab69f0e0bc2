#include "contactmoc/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "contactmoc/error.hpp"

namespace contactmoc {

void upwind_update(std::span<const double> z, std::span<const double> lambda, double h_xi, double h_eta,
                   std::span<double> out) {
  const std::size_t n = z.size();
  const double r = h_xi / h_eta;
  for (std::size_t k = 0; k < n; ++k) {
    const double l = lambda[k];
    if (l > 0.0)
      out[k] = k == 0 ? z[k] : z[k] - r * l * (z[k] - z[k - 1]);
    else if (l < 0.0)
      out[k] = k + 1 == n ? z[k] : z[k] - r * l * (z[k + 1] - z[k]);
    else
      out[k] = z[k];
  }
}

ContactSolution solve_contact(double za_plus, double zb_minus, const StreamPoint& sp_a, const StreamPoint& sp_b,
                              const GasConstants& g, const InversionOptions& opt, double guess) {
  const double target = zb_minus - za_plus;
  const double hi = std::min(sonic_pressure(sp_a, g), sonic_pressure(sp_b, g)) * (1.0 - opt.sonic_margin);
  double lo_b = 0.0, hi_b = hi;
  double P = std::clamp(guess, 1e-3 * hi, hi * (1.0 - 1e-9));
  for (int it = 0; it < 4 * opt.max_newton_iters; ++it) {
    const double ta = theta(P, sp_a, g, opt);
    const double f = ta + theta(P, sp_b, g, opt) - target;
    if (std::abs(f) <= opt.newton_tol) return {P, za_plus + ta};
    if (f > 0)
      hi_b = P;
    else
      lo_b = P;
    double next = P - f / (dtheta_dp(P, sp_a, g) + dtheta_dp(P, sp_b, g));
    if (!(next > lo_b && next < hi_b)) next = 0.5 * (lo_b + hi_b);
    P = next;
  }
  throw Error(ErrorKind::NoConvergence, "contact pressure solve did not converge");
}

namespace {

struct Row {
  int n;
  double h;
};

}  // namespace

OracleGrid upwind_march(const MocProblem& prob, const OracleOptions& opt) {
  const LagrangianDomain& d = prob.domain;
  const GasConstants& g = prob.gas;
  OracleGrid out;
  out.grid = background_grid(d);
  const Row ra{d.neta_a, d.deta_a()}, rb{d.neta_b, d.deta_b()};
  const std::size_t sa = std::size_t(ra.n) + 1, sb = std::size_t(rb.n) + 1;
  const StreamPoint cp_a = prob.streams.a.node(0), cp_b = prob.streams.b.node(sb - 1);

  SlabPair cur = prob.inlet;
  std::vector<double> pa(sa, prob.streams.a.p_ref()), pb(sb, prob.streams.b.p_ref());
  LayerLambdas la, lb;
  for (auto* v : {&la.minus, &la.plus}) v->resize(sa);
  for (auto* v : {&lb.minus, &lb.plus}) v->resize(sb);
  double contact_p = prob.background_a.p;

  auto speeds = [&](const LayerInvariants& z, const StreamData& sd, std::vector<double>& p, LayerLambdas& l,
                    const std::optional<LambdaPair>& fixed, const char* layer, double xi) {
    double worst = 0;
    for (std::size_t k = 0; k < z.zm.size(); ++k) {
      if (fixed) {
        l.minus[k] = fixed->minus;
        l.plus[k] = fixed->plus;
      } else {
        try {
          const PrimitiveState s = state_from_invariants({z.zm[k], z.zp[k]}, sd.node(k), g, prob.inversion, p[k]);
          p[k] = s.p;
          const LambdaPair lp = lambda_pm(s, g);
          l.minus[k] = lp.minus;
          l.plus[k] = lp.plus;
        } catch (const Error& e) {
          throw Error(e.kind(), std::string(e.what()) + " in the upwind oracle at layer " + layer +
                                    ", xi=" + fmt17(xi) + ", k=" + std::to_string(k));
        }
      }
      worst = std::max({worst, std::abs(l.minus[k]), std::abs(l.plus[k])});
    }
    return worst;
  };

  auto put = [&](int i) {
    std::copy(cur.a.zm.begin(), cur.a.zm.end(), out.grid.a.zm.begin() + i * sa);
    std::copy(cur.a.zp.begin(), cur.a.zp.end(), out.grid.a.zp.begin() + i * sa);
    std::copy(cur.b.zm.begin(), cur.b.zm.end(), out.grid.b.zm.begin() + i * sb);
    std::copy(cur.b.zp.begin(), cur.b.zp.end(), out.grid.b.zp.begin() + i * sb);
  };
  put(0);

  SlabPair next = cur;
  double xi = 0.0;
  for (int j = 0; j < d.nxi; ++j) {
    const double target = d.xi(j + 1);
    int used = 0;
    while (xi < target) {
      const double ma = speeds(cur.a, prob.streams.a, pa, la, opt.constant_lambda_a, "a", xi);
      const double mb = speeds(cur.b, prob.streams.b, pb, lb, opt.constant_lambda_b, "b", xi);
      double h = opt.cfl * std::min(ra.h / std::max(ma, 1e-300), rb.h / std::max(mb, 1e-300));
      const int remaining = int(std::ceil((target - xi) / h - 1e-12));
      h = (target - xi) / std::max(remaining, 1);
      if (++used > opt.max_substeps)
        throw Error(ErrorKind::CflViolation, "upwind oracle sub-step count exploded at xi=" + fmt17(xi));

      upwind_update(cur.a.zm, la.plus, h, ra.h, next.a.zm);
      upwind_update(cur.a.zp, la.minus, h, ra.h, next.a.zp);
      upwind_update(cur.b.zm, lb.plus, h, rb.h, next.b.zm);
      upwind_update(cur.b.zp, lb.minus, h, rb.h, next.b.zp);
      xi = remaining <= 1 ? target : xi + h;

      const double tp = 2.0 * std::atan(prob.geometry.upper.slope(xi));
      const double tm = 2.0 * std::atan(prob.geometry.lower.slope(xi));
      next.a.zp[sa - 1] = tp - next.a.zm[sa - 1];
      next.b.zm[0] = tm - next.b.zp[0];
      const ContactSolution cs =
          solve_contact(next.a.zp[0], next.b.zm[sb - 1], cp_a, cp_b, g, prob.inversion, contact_p);
      contact_p = cs.pressure;
      next.a.zm[0] = 2.0 * cs.angle - next.a.zp[0];
      next.b.zp[sb - 1] = 2.0 * cs.angle - next.b.zm[sb - 1];
      std::swap(cur, next);
    }
    out.max_substeps = std::max(out.max_substeps, used);
    put(j + 1);
  }
  return out;
}

double DifferenceReport::sup() const { return std::max({a_minus.sup, a_plus.sup, b_minus.sup, b_plus.sup}); }

DifferenceReport compare_fields(const InvariantGrid& a, const OracleGrid& b) {
  const LagrangianDomain& d = a.domain;
  if (!(d == b.grid.domain)) throw Error(ErrorKind::LatticeMismatch, "compared grids live on different lattices");
  auto diff = [&](const std::vector<double>& x, const std::vector<double>& y, double deta) {
    FieldDifference f;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double e = std::abs(x[k] - y[k]);
      f.sup = std::max(f.sup, e);
      f.l1 += e;
    }
    f.l1 *= d.dxi() * deta;
    return f;
  };
  DifferenceReport r;
  r.a_minus = diff(a.a.zm, b.grid.a.zm, d.deta_a());
  r.a_plus = diff(a.a.zp, b.grid.a.zp, d.deta_a());
  r.b_minus = diff(a.b.zm, b.grid.b.zm, d.deta_b());
  r.b_plus = diff(a.b.zp, b.grid.b.zp, d.deta_b());
  return r;
}

}  // namespace contactmoc
