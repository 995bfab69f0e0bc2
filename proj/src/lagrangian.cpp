#include "contactmoc/lagrangian.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <fstream>

#include "contactmoc/error.hpp"

namespace contactmoc {

namespace {

using GL4 = boost::math::quadrature::gauss<double, 4>;

double mass_density(const LayerProfile& l, double y) { return l.rho(y) * l.u(y); }

// Cumulative integral of rho u at the table nodes. The integrand is a product
// of two cubics per segment, so four-point Gauss is exact.
std::vector<double> cumulative_flux(const LayerProfile& l) {
  const auto& y = l.table.y;
  std::vector<double> c(y.size(), 0.0);
  for (std::size_t k = 0; k + 1 < y.size(); ++k)
    c[k + 1] = c[k] + GL4::integrate([&](double t) { return mass_density(l, t); }, y[k], y[k + 1]);
  return c;
}

// y in the layer with cumulative flux F(y) = target.
double invert_flux(const LayerProfile& l, const std::vector<double>& cum, double target) {
  const auto& y = l.table.y;
  if (target <= cum.front()) return y.front();
  if (target >= cum.back()) return y.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), target);
  const std::size_t k = std::size_t(it - cum.begin()) - 1;
  double lo = y[k], hi = y[k + 1];
  auto F = [&](double t) { return cum[k] + GL4::integrate([&](double s) { return mass_density(l, s); }, y[k], t) - target; };
  double x = lo + (hi - lo) * (target - cum[k]) / (cum[k + 1] - cum[k]);
  for (int it2 = 0; it2 < 100; ++it2) {
    const double r = F(x);
    if (std::abs(r) <= 1e-15 * std::max(1.0, std::abs(target))) return x;
    if (r < 0) lo = x;
    else hi = x;
    double next = x - r / mass_density(l, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4e-16 * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  throw Error(ErrorKind::Internal, "inlet stream-function inversion failed at eta=" + fmt17(target));
}

}  // namespace

MassFluxes mass_fluxes(const InletProfile& profile) {
  return {cumulative_flux(profile.a).back(), cumulative_flux(profile.b).back()};
}

LagrangianDomain make_domain(const NozzleGeometry& geom, const MassFluxes& flux, int nxi, int neta_a, int neta_b) {
  if (nxi < 1 || neta_a < 1 || neta_b < 1) throw Error(ErrorKind::InvalidArgument, "lattice sizes must be positive");
  if (!(flux.m_a > 0) || !(flux.m_b > 0)) throw Error(ErrorKind::InvalidArgument, "mass fluxes must be positive");
  return {geom.length, flux.m_a, flux.m_b, nxi, neta_a, neta_b};
}

double inlet_ordinate(const InletProfile& profile, const MassFluxes& flux, double eta) {
  if (eta >= 0.0) {
    if (eta == 0.0) return 0.0;
    if (eta >= flux.m_a) return profile.a.y_hi();
    return invert_flux(profile.a, cumulative_flux(profile.a), eta);
  }
  if (eta <= -flux.m_b) return profile.b.y_lo();
  return invert_flux(profile.b, cumulative_flux(profile.b), eta + flux.m_b);
}

LagrangianInlet inlet_to_lagrangian(const InletProfile& profile, const MassFluxes& flux, const LagrangianDomain& dom) {
  LagrangianInlet out;
  const auto cum_a = cumulative_flux(profile.a);
  const auto cum_b = cumulative_flux(profile.b);
  for (int k = 0; k <= dom.neta_a; ++k) {
    const double eta = dom.eta_a(k);
    const double y = k == 0 ? 0.0 : k == dom.neta_a ? profile.a.y_hi() : invert_flux(profile.a, cum_a, eta);
    out.eta_a.push_back(eta);
    out.y_a.push_back(y);
    out.a.push_back(profile.a.at(y));
  }
  for (int k = 0; k <= dom.neta_b; ++k) {
    const double eta = dom.eta_b(k);
    const double y = k == 0 ? profile.b.y_lo() : k == dom.neta_b ? 0.0 : invert_flux(profile.b, cum_b, eta + flux.m_b);
    out.eta_b.push_back(eta);
    out.y_b.push_back(y);
    out.b.push_back(profile.b.at(y));
  }
  return out;
}

LayerStreams stream_data_from_inlet(const LagrangianInlet& inlet, const GasConstants& g, double p_ref,
                                    const InversionOptions& opt) {
  auto build = [&](const std::vector<double>& eta, const std::vector<PrimitiveState>& states, const char* layer) {
    std::vector<double> A, B;
    for (std::size_t k = 0; k < states.size(); ++k) {
      const StreamPoint sp{entropy_function(states[k], g), bernoulli(states[k], g), p_ref};
      const double ps = sonic_pressure(sp, g) * (1.0 - opt.sonic_margin);
      if (!(states[k].p < ps) || !(p_ref < ps))
        throw Error(ErrorKind::SonicLimit, std::string("stream data reaches the sonic limit in layer ") + layer +
                                               " at eta=" + fmt17(eta[k]));
      A.push_back(sp.A0);
      B.push_back(sp.B0);
    }
    return StreamData(eta, A, B, p_ref);
  };
  return {build(inlet.eta_a, inlet.a, "a"), build(inlet.eta_b, inlet.b, "b")};
}

EulerianField reconstruct(const PrimitiveGrid& fields, const NozzleGeometry& geom) {
  const LagrangianDomain& d = fields.domain;
  EulerianField out;
  out.domain = d;
  const int na = d.neta_a + 1, nb = d.neta_b + 1;
  out.a.resize(std::size_t(d.nxi + 1) * na);
  out.b.resize(std::size_t(d.nxi + 1) * nb);
  std::vector<double> fa(na), fb(nb);
  for (int i = 0; i <= d.nxi; ++i) {
    const double x = d.xi(i);
    for (int k = 0; k < nb; ++k) {
      const auto& s = fields.b[std::size_t(i) * nb + k];
      if (!(s.rho * s.u > 0.0))
        throw Error(ErrorKind::JacobianDegenerate, "rho u <= 0 in layer b at xi=" + fmt17(x) + " eta=" + fmt17(d.eta_b(k)));
      fb[k] = 1.0 / (s.rho * s.u);
    }
    for (int k = 0; k < na; ++k) {
      const auto& s = fields.a[std::size_t(i) * na + k];
      if (!(s.rho * s.u > 0.0))
        throw Error(ErrorKind::JacobianDegenerate, "rho u <= 0 in layer a at xi=" + fmt17(x) + " eta=" + fmt17(d.eta_a(k)));
      fa[k] = 1.0 / (s.rho * s.u);
    }
    const auto cb = cumulative_simpson(fb, d.deta_b());
    const auto ca = cumulative_simpson(fa, d.deta_a());
    const double y0 = geom.lower(x);
    for (int k = 0; k < nb; ++k) {
      const auto& s = fields.b[std::size_t(i) * nb + k];
      out.b[std::size_t(i) * nb + k] = {x, y0 + cb[k], s.u, s.v, s.p, s.rho};
    }
    const double ycd = y0 + cb[nb - 1];
    for (int k = 0; k < na; ++k) {
      const auto& s = fields.a[std::size_t(i) * na + k];
      out.a[std::size_t(i) * na + k] = {x, ycd + ca[k], s.u, s.v, s.p, s.rho};
    }
    out.upper_mismatch = std::max(out.upper_mismatch, std::abs(ycd + ca[na - 1] - geom.upper(x)));
    const auto& sa = fields.a[std::size_t(i) * na];
    const auto& sb = fields.b[std::size_t(i) * nb + nb - 1];
    out.contact.x.push_back(x);
    out.contact.g_cd.push_back(ycd);
    out.contact.slope.push_back(0.5 * (sa.v / sa.u + sb.v / sb.u));
  }
  return out;
}

std::vector<double> fd_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 5) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t a = k == 0 ? 0 : k - 1, b = std::min(n - 1, k + 1);
      d[k] = b > a ? (f[b] - f[a]) / (double(b - a) * h) : 0.0;
    }
    return d;
  }
  for (std::size_t k = 2; k + 2 < n; ++k) d[k] = (-f[k + 2] + 8 * f[k + 1] - 8 * f[k - 1] + f[k - 2]) / (12 * h);
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h);
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) / (12 * h);
  d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) / (12 * h);
  return d;
}

namespace {

struct Fluxes {
  std::array<double, 4> W, H;
};

Fluxes euler_fluxes(const EulerPoint& s, const GasConstants& g) {
  const double B = 0.5 * (s.u * s.u + s.v * s.v) + g.gamma * s.p / ((g.gamma - 1.0) * s.rho);
  const double mu = s.rho * s.u, mv = s.rho * s.v;
  return {{mu, mu * s.u + s.p, mu * s.v, mu * B}, {mv, mv * s.u, mv * s.v + s.p, mv * B}};
}

void layer_residual(const std::vector<EulerPoint>& pts, int nxi, int n, const GasConstants& g, WeakResidualReport& r,
                    double& sum, long& count) {
  std::vector<Fluxes> fl(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) fl[k] = euler_fluxes(pts[k], g);
  for (int i = 0; i < nxi; ++i)
    for (int k = 0; k < n; ++k) {
      const std::size_t c[4] = {std::size_t(i) * (n + 1) + k, std::size_t(i + 1) * (n + 1) + k,
                                std::size_t(i + 1) * (n + 1) + k + 1, std::size_t(i) * (n + 1) + k + 1};
      double area = 0;
      std::array<double, 4> acc{};
      for (int e = 0; e < 4; ++e) {
        const auto& pa = pts[c[e]];
        const auto& pb = pts[c[(e + 1) % 4]];
        const double dx = pb.x - pa.x, dy = pb.y - pa.y;
        area += pa.x * pb.y - pb.x * pa.y;
        for (int q = 0; q < 4; ++q)
          acc[q] += 0.5 * (fl[c[e]].W[q] + fl[c[(e + 1) % 4]].W[q]) * dy - 0.5 * (fl[c[e]].H[q] + fl[c[(e + 1) % 4]].H[q]) * dx;
      }
      area *= 0.5;
      for (int q = 0; q < 4; ++q) {
        const double res = std::abs(acc[q] / area);
        r.max_per_flux[q] = std::max(r.max_per_flux[q], res);
        r.max_residual = std::max(r.max_residual, res);
        sum += res;
        ++count;
      }
    }
}

}  // namespace

WeakResidualReport weak_residual(const EulerianField& field, const GasConstants& g, double contact_tol) {
  WeakResidualReport r;
  const auto& d = field.domain;
  double sum = 0;
  long count = 0;
  layer_residual(field.a, d.nxi, d.neta_a, g, r, sum, count);
  layer_residual(field.b, d.nxi, d.neta_b, g, r, sum, count);
  r.mean_residual = count ? sum / double(count) : 0.0;

  const auto slope = fd_derivative(field.contact.g_cd, d.dxi());
  const int na = d.neta_a + 1, nb = d.neta_b + 1;
  for (int i = 0; i <= d.nxi; ++i) {
    const auto& sa = field.a[std::size_t(i) * na];
    const auto& sb = field.b[std::size_t(i) * nb + nb - 1];
    const double norm = std::sqrt(1.0 + slope[i] * slope[i]);
    r.contact_mass_flux = std::max({r.contact_mass_flux, std::abs(sa.rho * (sa.v - sa.u * slope[i])) / norm,
                                    std::abs(sb.rho * (sb.v - sb.u * slope[i])) / norm});
    r.contact_pressure_jump = std::max(r.contact_pressure_jump, std::abs(sa.p - sb.p));
    r.contact_slope_gap = std::max(r.contact_slope_gap, std::abs(slope[i] - field.contact.slope[i]));
  }
  r.contact_ok = r.contact_mass_flux <= contact_tol && r.contact_pressure_jump <= contact_tol;
  return r;
}

StreamlineDeviation streamline_deviation(const EulerianField& field, const GasConstants& g) {
  StreamlineDeviation dev;
  auto layer = [&](const std::vector<EulerPoint>& pts, int n) {
    for (int k = 0; k <= n; ++k) {
      const auto& s0 = pts[std::size_t(k)];
      const PrimitiveState p0{s0.u, s0.v, s0.p, s0.rho};
      const double B0 = bernoulli(p0, g), A0 = entropy_function(p0, g);
      for (int i = 1; i <= field.domain.nxi; ++i) {
        const auto& s = pts[std::size_t(i) * (n + 1) + k];
        const PrimitiveState ps{s.u, s.v, s.p, s.rho};
        dev.bernoulli = std::max(dev.bernoulli, std::abs(bernoulli(ps, g) - B0));
        dev.entropy = std::max(dev.entropy, std::abs(entropy_function(ps, g) - A0));
      }
    }
  };
  layer(field.a, field.domain.neta_a);
  layer(field.b, field.domain.neta_b);
  return dev;
}

void write_fields_csv(const EulerianField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "x,y,u,v,p,rho,layer\n";
  auto emit = [&](const std::vector<EulerPoint>& pts, const char* name) {
    for (const auto& s : pts)
      out << fmt17(s.x) << ',' << fmt17(s.y) << ',' << fmt17(s.u) << ',' << fmt17(s.v) << ',' << fmt17(s.p) << ','
          << fmt17(s.rho) << ',' << name << '\n';
  };
  emit(field.b, "b");
  emit(field.a, "a");
}

void write_contact_csv(const EulerianField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "x,g_cd\n";
  for (std::size_t i = 0; i < field.contact.x.size(); ++i)
    out << fmt17(field.contact.x[i]) << ',' << fmt17(field.contact.g_cd[i]) << '\n';
}

}  // namespace contactmoc
