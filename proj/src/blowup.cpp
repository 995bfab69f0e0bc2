#include "contactmoc/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "contactmoc/error.hpp"

namespace contactmoc {

namespace {

constexpr double kMargin = 1e-6;
constexpr int kTableIntervals = 4096;

}  // namespace

IrrotationalModel::IrrotationalModel(double gamma, double q_hat, double q_ref)
    : gamma_(gamma), q_hat_(q_hat), q_ref_(q_ref) {
  if (!(gamma > 1.0)) throw Error(ErrorKind::InvalidArgument, "gamma must exceed 1");
  if (!(q_hat > 0.0)) throw Error(ErrorKind::InvalidArgument, "limit speed must be positive");
  if (!(q_ref > critical_speed() && q_ref < q_hat))
    throw Error(ErrorKind::NotSupersonic, "reference speed " + fmt17(q_ref) + " is not between the critical speed " +
                                              fmt17(critical_speed()) + " and the limit speed " + fmt17(q_hat));
  table_lo_ = q_ref - 0.6 * (q_ref - critical_speed());
  const double hi = q_ref + 0.6 * (q_hat - q_ref);
  table_h_ = (hi - table_lo_) / kTableIntervals;
  table_theta_.resize(kTableIntervals + 1);
  table_slope_.resize(kTableIntervals + 1);
  for (int k = 0; k <= kTableIntervals; ++k) {
    const double q = table_lo_ + k * table_h_;
    table_theta_[k] = theta(q);
    table_slope_[k] = dtheta(q);
  }
}

IrrotationalModel IrrotationalModel::from_settings(const BlowupSettings& s, const GasConstants& g) {
  const double q_hat =
      s.q_hat ? *s.q_hat
              : std::sqrt(s.u_background * s.u_background +
                          2.0 * std::pow(s.rho_background, g.gamma - 1.0) / (g.gamma - 1.0));
  return IrrotationalModel(g.gamma, q_hat, s.u_background);
}

double IrrotationalModel::critical_speed() const { return q_hat_ * std::sqrt((gamma_ - 1.0) / (gamma_ + 1.0)); }

double IrrotationalModel::sound_speed(double q) const {
  const double c2 = 0.5 * (gamma_ - 1.0) * (q_hat_ * q_hat_ - q * q);
  if (!(c2 > 0.0)) throw Error(ErrorKind::SonicLimit, "speed " + fmt17(q) + " reaches the limit speed");
  return std::sqrt(c2);
}

double IrrotationalModel::dtheta(double q) const {
  if (!(q > critical_speed() * (1.0 + kMargin)) || !(q < q_hat_ * (1.0 - kMargin)))
    throw Error(ErrorKind::SonicLimit, "speed " + fmt17(q) + " is outside the supersonic range");
  const double c = sound_speed(q);
  return std::sqrt(q * q - c * c) / (q * c);
}

double IrrotationalModel::theta(double q) const {
  dtheta(q);  // range check
  if (q == q_ref_) return 0.0;
  // Near the limit speed dTheta/dq grows like 1/sqrt(q_hat - q); q = q_hat - tau^2
  // makes the integrand smooth there.
  const bool near_limit = q_hat_ - std::max(q, q_ref_) < std::abs(q - q_ref_);
  const double ta = near_limit ? std::sqrt(q_hat_ - q_ref_) : q_ref_;
  const double tb = near_limit ? std::sqrt(q_hat_ - q) : q;
  const double span = tb - ta;
  // In tau, c = tau sqrt((gamma - 1)(2 q_hat - tau^2)/2) is taken from tau itself
  // so that q_hat - q is not recomputed by cancellation.
  auto f = [&](double s) {
    const double t = ta + s * span;
    if (!near_limit) return dtheta(t);
    const double qq = q_hat_ - t * t;
    const double c_over_t = std::sqrt(0.5 * (gamma_ - 1.0) * (2.0 * q_hat_ - t * t));
    const double c = t * c_over_t;
    return -2.0 * std::sqrt(qq * qq - c * c) / (qq * c_over_t);
  };
  double err = 0, l1 = 0;
  const double mean =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 20, 1e-13, &err, &l1);
  err *= 0.5 * std::abs(span);
  if (!(err <= 1e-12 * std::max(1.0, l1 * std::abs(span))))
    throw Error(ErrorKind::SonicLimit, "speed functional quadrature did not reach tolerance at q=" + fmt17(q));
  return mean * span;
}

double IrrotationalModel::theta_fast(double q) const {
  const double s = (q - table_lo_) / table_h_;
  if (!(s >= 0.0 && s <= kTableIntervals)) return theta(q);
  const int k = std::min(int(s), kTableIntervals - 1);
  return hermite_value(table_theta_[k], table_theta_[k + 1], table_slope_[k], table_slope_[k + 1], table_h_, s - k);
}

double IrrotationalModel::speed_from_theta(double value) const {
  // Theta is increasing in q: Newton safeguarded by bisection on [lo, hi].
  double lo = critical_speed() * (1.0 + 2.0 * kMargin), hi = q_hat_ * (1.0 - 2.0 * kMargin);
  double q = std::clamp(q_ref_ + value / dtheta(q_ref_), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = theta_fast(q) - value;
    if (f < 0.0) lo = q;
    else hi = q;
    double next = q - f / dtheta(q);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - q) <= 1e-15 * q) return next;
    if (hi - lo <= 4e-16 * q) break;
    q = next;
  }
  if (q <= critical_speed() * (1.0 + 3.0 * kMargin) || q >= q_hat_ * (1.0 - 3.0 * kMargin))
    throw Error(ErrorKind::OutOfRange, "Theta=" + fmt17(value) + " is outside the supersonic range");
  return q;
}

IrrotationalState irrot_invariants(const PrimitiveState& s, const IrrotationalModel& m) {
  if (!(s.u > 0.0)) throw Error(ErrorKind::NotSupersonic, "u must be positive");
  IrrotationalState out;
  out.q = std::hypot(s.u, s.v);
  out.angle = std::atan(s.v / s.u);
  const double th = m.theta(out.q);
  out.z_plus = out.angle + th;
  out.z_minus = out.angle - th;
  return out;
}

LambdaPair irrot_lambdas(double u, double v, const IrrotationalModel& m) {
  const double q2 = u * u + v * v;
  const double c = m.sound_speed(std::sqrt(q2));
  const double den = u * u - c * c;
  if (!(den > 0.0)) throw Error(ErrorKind::Degenerate, "u <= c");
  const double root = c * std::sqrt(q2 - c * c);
  return {(u * v - root) / den, (u * v + root) / den};
}

Velocity irrot_velocity(double z_plus, double z_minus, const IrrotationalModel& m) {
  const double angle = 0.5 * (z_plus + z_minus);
  const double q = m.speed_from_theta(0.5 * (z_plus - z_minus));
  return {q * std::cos(angle), q * std::sin(angle)};
}

std::vector<std::string> check_compatibility(const BlowupSettings& s, double tol) {
  std::vector<std::string> out;
  for (double y : {0.0, 1.0}) {
    const auto u = s.u0.derivatives(y), v = s.v0.derivatives(y), r = s.rho0.derivatives(y);
    const std::string at = " at y=" + std::string(y == 0.0 ? "0" : "1") + ": ";
    if (std::abs(v[0]) > tol) out.push_back("v" + at + fmt17(v[0]));
    if (std::abs(u[1]) > tol) out.push_back("du/dy" + at + fmt17(u[1]));
    if (std::abs(r[1]) > tol) out.push_back("drho/dy" + at + fmt17(r[1]));
    if (std::abs(v[2]) > tol) out.push_back("d2v/dy2" + at + fmt17(v[2]));
  }
  return out;
}

double PeriodicProfile::reduce(double y) { return y - 2.0 * std::floor(0.5 * (y + 1.0)); }

PrimitiveState PeriodicProfile::at(double y) const {
  const double r = reduce(y);
  if (r >= 0.0) return {u_(r), v_(r), 0.0, rho_(r)};
  return {u_(-r), -v_(-r), 0.0, rho_(-r)};
}

MarchOptions march_options(const BlowupSettings& s) {
  MarchOptions o;
  o.markers = s.markers;
  o.x_max = s.x_max;
  o.dx_max = s.dx_max;
  o.grad_factor = s.grad_factor;
  return o;
}

namespace {

// Markers of one family: positions increasing within one period.
bool ordered(const std::vector<double>& y) {
  for (std::size_t i = 0; i + 1 < y.size(); ++i)
    if (!(y[i + 1] > y[i])) return false;
  return y.back() - y.front() < 2.0;
}

class PeriodicInterpolant {
 public:
  PeriodicInterpolant(const std::vector<double>& y, const std::vector<double>& z) : y0_(y.front()) {
    const int n = int(y.size()), pad = 3;
    std::vector<double> xs, fs;
    xs.reserve(n + 2 * pad);
    fs.reserve(n + 2 * pad);
    for (int i = -pad; i < n + pad; ++i) {
      const int k = ((i % n) + n) % n;
      const double shift = 2.0 * double((i - k) / n);
      xs.push_back(y[k] + shift);
      fs.push_back(z[k]);
    }
    f_ = MonotoneCubic(std::move(xs), std::move(fs));
  }
  double operator()(double y) const {
    double r = y - y0_;
    r -= 2.0 * std::floor(0.5 * r);
    return f_(y0_ + r);
  }

 private:
  double y0_;
  MonotoneCubic f_;
};

double max_gradient(const std::vector<double>& y, const std::vector<double>& z) {
  const std::size_t n = y.size();
  double g = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double dy = j == 0 ? y[0] + 2.0 - y[i] : y[j] - y[i];
    g = std::max(g, std::abs(z[j] - z[i]) / dy);
  }
  return g;
}

}  // namespace

BlowupReport cauchy_march(const PeriodicProfile& profile, const IrrotationalModel& model, const MarchOptions& opt) {
  const int n = opt.markers;
  if (n < 8) throw Error(ErrorKind::InvalidArgument, "at least 8 markers are needed");
  std::vector<double> yp(n), ym(n), zp(n), zm(n);
  for (int i = 0; i < n; ++i) {
    const double y = -1.0 + (i + 0.5) * 2.0 / n;
    const IrrotationalState s = irrot_invariants(profile.at(y), model);
    yp[i] = ym[i] = y;
    zp[i] = s.z_plus;
    zm[i] = s.z_minus;
  }

  // Z+ markers move with lambda_minus, Z- markers with lambda_plus.
  auto speeds = [&](const std::vector<double>& py, const std::vector<double>& my, std::vector<double>& vp,
                    std::vector<double>& vm) {
    const PeriodicInterpolant fm(my, zm), fp(py, zp);
    for (int i = 0; i < n; ++i) {
      const Velocity a = irrot_velocity(zp[i], fm(py[i]), model);
      vp[i] = irrot_lambdas(a.u, a.v, model).minus;
      const Velocity b = irrot_velocity(fp(my[i]), zm[i], model);
      vm[i] = irrot_lambdas(b.u, b.v, model).plus;
    }
  };

  BlowupReport r;
  auto record = [&](double x, double gp, double gm) {
    r.x.push_back(x);
    r.max_grad_zp.push_back(gp);
    r.max_grad_zm.push_back(gm);
  };
  auto fire = [&](const char* detector, const char* family, double x, double y) {
    if (!r.trigger) r.trigger = BlowupTrigger{detector, family, x, PeriodicProfile::reduce(y)};
  };

  double x = 0.0;
  double gp = max_gradient(yp, zp), gm = max_gradient(ym, zm);
  const double gp0 = gp, gm0 = gm;
  record(x, gp, gm);

  std::vector<double> k1p(n), k1m(n), k2p(n), k2m(n), tp(n), tm(n);
  while (x < opt.x_max && r.steps < opt.max_steps) {
    speeds(yp, ym, k1p, k1m);

    if (!r.crossing_x) {
      auto predict = [&](const std::vector<double>& y, const std::vector<double>& v, const char* family) {
        for (int i = 0; i < n; ++i) {
          const int j = (i + 1) % n;
          const double gap = j == 0 ? y[0] + 2.0 - y[i] : y[j] - y[i];
          const double closing = v[i] - v[j];
          if (closing > 0.0 && gap <= opt.dx_max * closing) {
            r.crossing_x = x;
            fire("crossing", family, x, y[i] + 0.5 * gap);
            return;
          }
        }
      };
      predict(yp, k1p, "Z+");
      if (!r.crossing_x) predict(ym, k1m, "Z-");
    }
    if (r.crossing_x && r.gradient_x) break;

    double h = std::min({opt.dx_max, opt.x_max - x, 0.1 / std::max({gp, gm, 1e-300})});
    if (!(h > 1e-12)) break;
    for (int i = 0; i < n; ++i) {
      tp[i] = yp[i] + h * k1p[i];
      tm[i] = ym[i] + h * k1m[i];
    }
    bool crossed = !ordered(tp) || !ordered(tm);
    if (!crossed) {
      speeds(tp, tm, k2p, k2m);
      for (int i = 0; i < n; ++i) {
        yp[i] += 0.5 * h * (k1p[i] + k2p[i]);
        ym[i] += 0.5 * h * (k1m[i] + k2m[i]);
      }
      crossed = !ordered(yp) || !ordered(ym);
    }
    x = std::min(opt.x_max, x + h);
    ++r.steps;
    if (crossed) {
      r.markers_crossed = true;
      if (!r.crossing_x) {
        r.crossing_x = x;
        fire("crossing", ordered(yp) && ordered(tp) ? "Z-" : "Z+", x, 0.0);
      }
      break;
    }
    gp = max_gradient(yp, zp);
    gm = max_gradient(ym, zm);
    record(x, gp, gm);
    if (!r.gradient_x) {
      const bool fp = gp0 > 0.0 && gp > opt.grad_factor * gp0;
      const bool fm = gm0 > 0.0 && gm > opt.grad_factor * gm0;
      if (fp || fm) {
        r.gradient_x = x;
        const auto& y = fp ? yp : ym;
        const auto& z = fp ? zp : zm;
        std::size_t at = 0;
        double best = -1;
        for (int i = 0; i < n; ++i) {
          const int j = (i + 1) % n;
          const double dy = j == 0 ? y[0] + 2.0 - y[i] : y[j] - y[i];
          const double g = std::abs(z[j] - z[i]) / dy;
          if (g > best) {
            best = g;
            at = std::size_t(i);
          }
        }
        fire("gradient", fp ? "Z+" : "Z-", x, y[at]);
      }
    }
    if (r.crossing_x && r.gradient_x) break;
  }
  r.x_end = x;
  if (r.gradient_x || r.crossing_x)
    r.blowup_x = std::min(r.gradient_x.value_or(INFINITY), r.crossing_x.value_or(INFINITY));
  return r;
}

std::optional<std::size_t> detect_blowup(std::span<const double> history, double factor) {
  if (history.empty()) throw Error(ErrorKind::InvalidArgument, "empty gradient history");
  if (!(history[0] > 0.0)) return std::nullopt;
  for (std::size_t i = 0; i < history.size(); ++i)
    if (history[i] > factor * history[0]) return i;
  return std::nullopt;
}

void write_gradient_csv(const BlowupReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "x,max_grad_Zp,max_grad_Zm\n";
  for (std::size_t i = 0; i < r.x.size(); ++i)
    out << fmt17(r.x[i]) << ',' << fmt17(r.max_grad_zp[i]) << ',' << fmt17(r.max_grad_zm[i]) << '\n';
}

}  // namespace contactmoc
