#include "contactmoc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "contactmoc/error.hpp"

namespace contactmoc {

namespace {

double endpoint_slope(double h0, double h1, double del0, double del1) {
  double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
  if (std::signbit(d) != std::signbit(del0) || del0 == 0.0) return 0.0;
  if (std::signbit(del0) != std::signbit(del1) && std::abs(d) > std::abs(3.0 * del0)) return 3.0 * del0;
  return d;
}

double interior_slope(double h0, double h1, double del0, double del1) {
  if (del0 == 0.0 || del1 == 0.0 || std::signbit(del0) != std::signbit(del1)) return 0.0;
  double w1 = 2.0 * h1 + h0;
  double w2 = h1 + 2.0 * h0;
  return (w1 + w2) / (w1 / del0 + w2 / del1);
}

}  // namespace

std::vector<double> monotone_slopes(std::span<const double> x, std::span<const double> f) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / (x[1] - x[0]);
    return d;
  }
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    del[k] = (f[k + 1] - f[k]) / h[k];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = interior_slope(h[k - 1], h[k], del[k - 1], del[k]);
  d[0] = endpoint_slope(h[0], h[1], del[0], del[1]);
  d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  return d;
}

void monotone_slopes_uniform(std::span<const double> f, double h, std::span<double> d) {
  const std::size_t n = f.size();
  if (n < 2) {
    if (n == 1) d[0] = 0.0;
    return;
  }
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / h;
    return;
  }
  double prev = (f[1] - f[0]) / h;
  const double first = prev;
  const double second = (f[2] - f[1]) / h;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    double next = (f[k + 1] - f[k]) / h;
    d[k] = (prev == 0.0 || next == 0.0 || std::signbit(prev) != std::signbit(next))
               ? 0.0
               : 2.0 * prev * next / (prev + next);
    prev = next;
  }
  d[0] = endpoint_slope(h, h, first, second);
  d[n - 1] = endpoint_slope(h, h, (f[n - 1] - f[n - 2]) / h, (f[n - 2] - f[n - 3]) / h);
}

double hermite_value(double f0, double f1, double d0, double d1, double h, double s) {
  double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 +
         (s3 - s2) * h * d1;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> f) : x_(std::move(x)), f_(std::move(f)) {
  if (x_.size() != f_.size() || x_.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "monotone cubic needs at least two samples of matching size");
  for (std::size_t k = 0; k + 1 < x_.size(); ++k)
    if (!(x_[k + 1] > x_[k])) throw Error(ErrorKind::InvalidArgument, "interpolation nodes must increase strictly");
  d_ = monotone_slopes(x_, f_);
  const double h = (x_.back() - x_.front()) / double(x_.size() - 1);
  uniform_ = true;
  for (std::size_t k = 0; k + 1 < x_.size(); ++k)
    if (std::abs((x_[k + 1] - x_[k]) - h) > 1e-12 * std::max(1.0, std::abs(h))) {
      uniform_ = false;
      break;
    }
}

std::size_t MonotoneCubic::interval(double x) const {
  const std::size_t last = x_.size() - 2;
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return last;
  if (uniform_) {
    const double h = (x_.back() - x_.front()) / double(x_.size() - 1);
    auto k = static_cast<std::size_t>((x - x_.front()) / h);
    k = std::min(k, last);
    while (k > 0 && x < x_[k]) --k;
    while (k < last && x >= x_[k + 1]) ++k;
    return k;
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return std::min<std::size_t>(static_cast<std::size_t>(it - x_.begin()) - 1, last);
}

double MonotoneCubic::operator()(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  return hermite_value(f_[k], f_[k + 1], d_[k], d_[k + 1], h, (x - x_[k]) / h);
}

double MonotoneCubic::derivative(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double s = (x - x_[k]) / h, s2 = s * s;
  return ((6 * s2 - 6 * s) * f_[k] + (3 * s2 - 4 * s + 1) * h * d_[k] + (-6 * s2 + 6 * s) * f_[k + 1] +
          (3 * s2 - 2 * s) * h * d_[k + 1]) /
         h;
}

double MonotoneCubic::second_derivative(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double s = (x - x_[k]) / h;
  return ((12 * s - 6) * f_[k] + (6 * s - 4) * h * d_[k] + (-12 * s + 6) * f_[k + 1] + (6 * s - 2) * h * d_[k + 1]) /
         (h * h);
}

double lagrange4_uniform(std::span<const double> f, double x0, double h, double x) {
  const auto n = static_cast<long>(f.size());
  const double t = (x - x0) / h;
  if (n < 4) {
    long k = std::clamp(static_cast<long>(std::floor(t)), 0L, n - 2);
    double s = t - double(k);
    return f[k] + s * (f[k + 1] - f[k]);
  }
  long k = static_cast<long>(std::floor(t)) - 1;
  k = std::clamp(k, 0L, n - 4);
  const double s = t - double(k);
  const double s0 = s, s1 = s - 1, s2 = s - 2, s3 = s - 3;
  return -f[k] * s1 * s2 * s3 / 6.0 + f[k + 1] * s0 * s2 * s3 / 2.0 - f[k + 2] * s0 * s1 * s3 / 2.0 +
         f[k + 3] * s0 * s1 * s2 / 6.0;
}

double monotone_uniform_clipped(std::span<const double> f, std::span<const double> d, double x0, double h,
                                double x) {
  const auto n = static_cast<long>(f.size());
  long k = std::clamp(static_cast<long>(std::floor((x - x0) / h)), 0L, n - 2);
  const double s = std::clamp((x - x0) / h - double(k), 0.0, 1.0);
  const double v = hermite_value(f[k], f[k + 1], d[k], d[k + 1], h, s);
  return std::clamp(v, std::min(f[k], f[k + 1]), std::max(f[k], f[k + 1]));
}

std::vector<double> cumulative_simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> c(n, 0.0);
  if (n < 2) return c;
  if (n == 2) {
    c[1] = 0.5 * h * (f[0] + f[1]);
    return c;
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (k % 2 == 0) {
      c[k] = c[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    } else if (k + 1 < n) {
      c[k] = c[k - 1] + h / 12.0 * (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1]);
    } else {
      c[k] = c[k - 1] + h / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]);
    }
  }
  return c;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view error_category(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::SonicLimit: return "sonic-limit";
    case ErrorKind::NotSupersonic: return "not-supersonic";
    case ErrorKind::StreamDataMismatch: return "stream-data-mismatch";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::Cavitation: return "cavitation";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InvariantViolation: return "invariant-violation";
    case ErrorKind::JacobianDegenerate: return "jacobian-degenerate";
    case ErrorKind::LeftSupersonicRegime: return "left-supersonic-regime";
    case ErrorKind::LatticeMismatch: return "lattice-mismatch";
    case ErrorKind::CflViolation: return "cfl-violation";
    case ErrorKind::Io: return "io";
    case ErrorKind::Internal: return "internal";
  }
  return "internal";
}

}  // namespace contactmoc
