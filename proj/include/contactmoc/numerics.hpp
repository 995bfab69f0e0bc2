#pragma once

#include <span>
#include <string>
#include <vector>

namespace contactmoc {

// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland slopes).
// Evaluation outside the node range clamps to the end nodes.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> f);

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return f_; }
  const std::vector<double>& slopes() const { return d_; }
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_, f_, d_;
  bool uniform_ = false;
};

// Fritsch-Butland slopes for samples f on nodes x (x strictly increasing).
std::vector<double> monotone_slopes(std::span<const double> x, std::span<const double> f);
// Same on a uniform lattice with spacing h.
void monotone_slopes_uniform(std::span<const double> f, double h, std::span<double> d);

// Cubic Hermite basis evaluation on [x0, x0+h] at offset s = (x-x0)/h in [0,1].
double hermite_value(double f0, double f1, double d0, double d1, double h, double s);

// Four-point Lagrange interpolation on a uniform lattice x_k = x0 + k h,
// stencils shifted one-sided at the ends so they never leave [0, n-1].
double lagrange4_uniform(std::span<const double> f, double x0, double h, double x);

// Monotone cubic on a uniform lattice with precomputed slopes, clipped to the
// bracketing node values.
double monotone_uniform_clipped(std::span<const double> f, std::span<const double> d, double x0,
                                double h, double x);

// Cumulative composite Simpson integral of samples f on a uniform lattice.
// Entry k is the integral from node 0 to node k; odd nodes use the third-order
// half-panel formula.
std::vector<double> cumulative_simpson(std::span<const double> f, double h);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// 17 significant digits, the CSV number format.
std::string fmt17(double v);

}  // namespace contactmoc
