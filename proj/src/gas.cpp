#include "contactmoc/gas.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "contactmoc/error.hpp"

namespace contactmoc {

namespace {

void check_state(const PrimitiveState& s) {
  if (!(s.p > 0.0) || !(s.rho > 0.0) || !std::isfinite(s.p) || !std::isfinite(s.rho))
    throw Error(ErrorKind::InvalidArgument, "state needs positive finite p and rho");
}

void check_stream(const StreamPoint& sp) {
  if (!(sp.A0 > 0.0) || !(sp.B0 > 0.0) || !(sp.p_ref > 0.0))
    throw Error(ErrorKind::InvalidArgument, "stream data needs positive A0, B0 and p_ref");
}

// A0^{1/gamma} p^{(gamma-1)/gamma}, which equals p/rho on the streamline.
double p_over_rho(double p, const StreamPoint& sp, const GasConstants& g) {
  return std::pow(sp.A0, 1.0 / g.gamma) * std::pow(p, (g.gamma - 1.0) / g.gamma);
}

double admissible_max(const StreamPoint& sp, const GasConstants& g, const InversionOptions& opt) {
  return sonic_pressure(sp, g) * (1.0 - opt.sonic_margin);
}

std::string num(double v) { return fmt17(v); }

}  // namespace

void validate(const GasConstants& g) {
  if (!(g.gamma > 1.0) || !std::isfinite(g.gamma))
    throw Error(ErrorKind::InvalidArgument, "gamma must exceed 1, got " + num(g.gamma));
}

StreamData::StreamData(std::vector<double> eta, std::vector<double> A0, std::vector<double> B0, double p_ref)
    : eta_(std::move(eta)), A0_nodes_(std::move(A0)), B0_nodes_(std::move(B0)), p_ref_(p_ref) {
  if (eta_.size() != A0_nodes_.size() || eta_.size() != B0_nodes_.size() || eta_.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "stream data tables must have matching sizes of at least 2");
  for (std::size_t k = 0; k < eta_.size(); ++k)
    if (!(A0_nodes_[k] > 0.0) || !(B0_nodes_[k] > 0.0))
      throw Error(ErrorKind::InvariantViolation, "stream data needs A0 > 0 and B0 > 0 (eta=" + num(eta_[k]) + ")");
  if (!(p_ref_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "p_ref must be positive");
  A0_ = MonotoneCubic(eta_, A0_nodes_);
  B0_ = MonotoneCubic(eta_, B0_nodes_);
}

StreamPoint StreamData::at(double eta) const { return {A0_(eta), B0_(eta), p_ref_}; }

double sound_speed(const PrimitiveState& s, const GasConstants& g) {
  validate(g);
  check_state(s);
  return std::sqrt(g.gamma * s.p / s.rho);
}

bool is_supersonic(const PrimitiveState& s, const GasConstants& g) {
  const double c = sound_speed(s, g);
  return s.u * s.u + s.v * s.v > c * c;
}

double bernoulli(const PrimitiveState& s, const GasConstants& g) {
  validate(g);
  check_state(s);
  return 0.5 * (s.u * s.u + s.v * s.v) + g.gamma * s.p / ((g.gamma - 1.0) * s.rho);
}

double entropy_function(const PrimitiveState& s, const GasConstants& g) {
  validate(g);
  check_state(s);
  return s.p / std::pow(s.rho, g.gamma);
}

double density_from_entropy(double p, double A0, const GasConstants& g) { return std::pow(p / A0, 1.0 / g.gamma); }

double sonic_pressure(const StreamPoint& sp, const GasConstants& g) {
  check_stream(sp);
  const double gm = g.gamma;
  const double x = 2.0 * sp.B0 * (gm - 1.0) / (gm * (gm + 1.0));
  return std::pow(x / std::pow(sp.A0, 1.0 / gm), gm / (gm - 1.0));
}

double dtheta_dp(double p, const StreamPoint& sp, const GasConstants& g) {
  check_stream(sp);
  if (!(p > 0.0)) throw Error(ErrorKind::OutOfRange, "pressure must be positive, got " + num(p));
  const double gm = g.gamma;
  const double x = p_over_rho(p, sp, g);
  const double radicand = 2.0 * sp.B0 - gm * (gm + 1.0) / (gm - 1.0) * x;
  if (!(radicand > 0.0)) throw Error(ErrorKind::SonicLimit, "sonic limit reached at p=" + num(p));
  const double denom_b = sp.B0 - gm / (gm - 1.0) * x;
  return std::sqrt(radicand) /
         (2.0 * std::sqrt(gm) * std::pow(sp.A0, -0.5 / gm) * denom_b * std::pow(p, (gm + 1.0) / (2.0 * gm)));
}

double theta(double p, const StreamPoint& sp, const GasConstants& g, const InversionOptions& opt) {
  check_stream(sp);
  if (!(p > 0.0)) throw Error(ErrorKind::OutOfRange, "pressure must be positive, got " + num(p));
  const double pmax = admissible_max(sp, g, opt);
  if (p > pmax) throw Error(ErrorKind::SonicLimit, "pressure " + num(p) + " is within the sonic margin");
  if (sp.p_ref > pmax) throw Error(ErrorKind::SonicLimit, "p_ref " + num(sp.p_ref) + " is not supersonic on this streamline");
  if (p == sp.p_ref) return 0.0;
  // Integrate over the unit interval and rescale: the quadrature's error
  // estimate and refinement test are measured on its reference interval.
  // Intervals reaching close to the sonic pressure use p = p_sonic - tau^2,
  // which removes the square-root behaviour there; elsewhere p itself is
  // used, because p_sonic - tau^2 cancels badly when p << p_sonic.
  const double ps = sonic_pressure(sp, g);
  const bool near_sonic = ps - std::max(p, sp.p_ref) < std::abs(p - sp.p_ref);
  const double ta = near_sonic ? std::sqrt(ps - sp.p_ref) : sp.p_ref;
  const double tb = near_sonic ? std::sqrt(ps - p) : p;
  const double span = tb - ta;
  auto f = [&](double s) {
    const double t = ta + s * span;
    return near_sonic ? -2.0 * t * dtheta_dp(ps - t * t, sp, g) : dtheta_dp(t, sp, g);
  };
  double err = 0, l1 = 0;
  const double mean = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 20,
                                                                                     0.1 * opt.quad_tol, &err, &l1);
  const double value = mean * span;
  err *= 0.5 * std::abs(span);
  if (!std::isfinite(value) || !(err <= opt.quad_tol * std::max(1.0, l1 * std::abs(span))))
    throw Error(ErrorKind::SonicLimit, "pressure functional quadrature did not reach tolerance at p=" + num(p));
  return value;
}

InvariantPair invariants_from_state(const PrimitiveState& s, const StreamPoint& sp, const GasConstants& g,
                                    const InversionOptions& opt) {
  if (!is_supersonic(s, g) || !(s.u > 0.0))
    throw Error(ErrorKind::NotSupersonic, "state is not supersonic with u > 0");
  const double A = entropy_function(s, g), B = bernoulli(s, g);
  if (std::abs(A - sp.A0) > 1e-8 * sp.A0 || std::abs(B - sp.B0) > 1e-8 * sp.B0)
    throw Error(ErrorKind::StreamDataMismatch,
                "state gives A=" + num(A) + " B=" + num(B) + " but stream data has A0=" + num(sp.A0) + " B0=" + num(sp.B0));
  const double angle = std::atan(s.v / s.u);
  const double th = theta(s.p, sp, g, opt);
  return {angle + th, angle - th};
}

double pressure_from_invariants(const InvariantPair& z, const StreamPoint& sp, const GasConstants& g,
                                const InversionOptions& opt, std::optional<double> guess) {
  check_stream(sp);
  const double target = 0.5 * (z.z_minus - z.z_plus);
  if (!std::isfinite(target)) throw Error(ErrorKind::OutOfRange, "non-finite invariant difference");
  if (target == 0.0) return sp.p_ref;
  const double pmax = admissible_max(sp, g, opt);
  if (sp.p_ref > pmax) throw Error(ErrorKind::SonicLimit, "p_ref is not supersonic on this streamline");

  int iters = 0;
  auto residual = [&](double p) { return theta(p, sp, g, opt) - target; };

  // Undamped Newton first; falls through to the bracketed search if it strays.
  {
    double p = guess.value_or(sp.p_ref);
    if (!(p > 0.0) || p > pmax) p = sp.p_ref;
    double prev = INFINITY;
    for (int k = 0; k < 8 && iters < opt.max_newton_iters; ++k, ++iters) {
      const double r = residual(p);
      if (std::abs(r) <= opt.newton_tol) return p;
      if (!(std::abs(r) < prev)) break;
      prev = std::abs(r);
      const double next = p - r / dtheta_dp(p, sp, g);
      if (!(next > 0.0) || next > pmax) break;
      p = next;
    }
  }

  // Bracket [lo, hi] with residual(lo) < 0 < residual(hi), grown geometrically.
  const double p_lin = sp.p_ref + target / dtheta_dp(sp.p_ref, sp, g);
  double lo, hi;
  if (target > 0.0) {
    lo = sp.p_ref;
    double step = 2.0 * (p_lin - sp.p_ref);
    hi = std::min(sp.p_ref + step, pmax);
    while (residual(hi) < 0.0) {
      if (hi >= pmax)
        throw Error(ErrorKind::OutOfRange, "invariant difference " + num(target) + " exceeds the supersonic range");
      lo = hi;
      step *= 2.0;
      hi = std::min(sp.p_ref + step, pmax);
    }
  } else {
    hi = sp.p_ref;
    double step = 2.0 * (sp.p_ref - p_lin);
    lo = sp.p_ref - step;
    for (;;) {
      if (!(lo > 0.0)) lo = 0.5 * hi;
      if (residual(lo) <= 0.0) break;
      hi = lo;
      if (hi < 1e-12 * sp.p_ref)
        throw Error(ErrorKind::OutOfRange, "invariant difference " + num(target) + " needs vanishing pressure");
      step *= 2.0;
      lo = sp.p_ref - step;
    }
  }

  double p = std::clamp(p_lin, lo, hi);
  for (; iters < opt.max_newton_iters; ++iters) {
    const double r = residual(p);
    if (std::abs(r) <= opt.newton_tol) return p;
    if (r < 0.0) lo = p;
    else hi = p;
    double next = p - r / dtheta_dp(p, sp, g);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    p = next;
  }
  throw Error(ErrorKind::NoConvergence, "pressure inversion did not converge for target " + num(target));
}

double flow_angle_tangent(const InvariantPair& z) {
  const double s = z.z_minus + z.z_plus;
  if (!(std::abs(s) < M_PI)) throw Error(ErrorKind::OutOfRange, "|z_minus + z_plus| must stay below pi");
  return std::tan(0.5 * s);
}

Velocity velocity_from_bernoulli(double w, double p, const StreamPoint& sp, const GasConstants& g) {
  check_stream(sp);
  const double gm = g.gamma;
  const double radicand = (gm - 1.0) * sp.B0 - gm * p_over_rho(p, sp, g);
  if (!(radicand > 0.0)) throw Error(ErrorKind::Cavitation, "no kinetic energy left at p=" + num(p));
  const double u = std::sqrt(2.0 * radicand / ((gm - 1.0) * (1.0 + w * w)));
  return {u, w * u};
}

PrimitiveState state_from_invariants(const InvariantPair& z, const StreamPoint& sp, const GasConstants& g,
                                     const InversionOptions& opt, std::optional<double> guess) {
  const double w = flow_angle_tangent(z);
  const double p = pressure_from_invariants(z, sp, g, opt, guess);
  const Velocity vel = velocity_from_bernoulli(w, p, sp, g);
  return {vel.u, vel.v, p, density_from_entropy(p, sp.A0, g)};
}

LambdaPair lambda_pm(const PrimitiveState& s, const GasConstants& g) {
  const double c = sound_speed(s, g);
  const double c2 = c * c;
  const double d = s.u * s.u - c2;
  if (!(d > 0.0)) throw Error(ErrorKind::Degenerate, "characteristic speeds need u > c");
  const double root = std::sqrt(s.u * s.u + s.v * s.v - c2);
  const double f = s.rho * s.u * c2 / d;
  return {f * (s.v / s.u - root / c), f * (s.v / s.u + root / c)};
}

}  // namespace contactmoc
