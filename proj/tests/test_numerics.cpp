#include <doctest.h>

#include <cmath>
#include <vector>

#include "contactmoc/numerics.hpp"
#include "generators.hpp"

using namespace contactmoc;
using contactmoc::testing::Gen;

TEST_CASE("monotone cubic reproduces nodes and preserves monotone data") {
  Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x{0.0}, f{gen.uniform(-1, 1)};
    const int n = gen.integer(3, 20);
    for (int k = 1; k < n; ++k) {
      x.push_back(x.back() + gen.uniform(0.05, 1.0));
      f.push_back(f.back() + gen.uniform(0.0, 2.0));
    }
    const MonotoneCubic m(x, f);
    for (int k = 0; k < n; ++k) CHECK(m(x[k]) == doctest::Approx(f[k]).epsilon(1e-14));
    double prev = m(x.front());
    for (int s = 1; s <= 400; ++s) {
      const double v = m(x.front() + (x.back() - x.front()) * s / 400.0);
      CHECK(v >= prev - 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("monotone cubic is exact for linear data and clamps outside") {
  const MonotoneCubic m({0.0, 0.5, 1.5, 2.0}, {1.0, 2.0, 4.0, 5.0});
  CHECK(m(1.0) == doctest::Approx(3.0));
  CHECK(m.derivative(1.2) == doctest::Approx(2.0));
  CHECK(m.second_derivative(0.7) == doctest::Approx(0.0));
  CHECK(m(-1.0) == 1.0);
  CHECK(m(3.0) == 5.0);
}

TEST_CASE("lagrange4 is exact for cubics including shifted end stencils") {
  std::vector<double> f;
  auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x; };
  for (int k = 0; k <= 10; ++k) f.push_back(p(0.1 * k));
  for (double x : {0.0, 0.03, 0.47, 0.91, 1.0}) CHECK(lagrange4_uniform(f, 0.0, 0.1, x) == doctest::Approx(p(x)).epsilon(1e-13));
}

TEST_CASE("clipped monotone interpolation stays between bracketing nodes") {
  Gen gen(12);
  std::vector<double> f(30);
  for (auto& v : f) v = gen.uniform(-1, 1);
  std::vector<double> d(f.size());
  monotone_slopes_uniform(f, 0.1, d);
  for (int s = 0; s < 1000; ++s) {
    const double x = gen.uniform(0.0, 2.9);
    const int k = std::min(int(x / 0.1), 28);
    const double v = monotone_uniform_clipped(f, d, 0.0, 0.1, x);
    CHECK(v >= std::min(f[k], f[k + 1]) - 1e-15);
    CHECK(v <= std::max(f[k], f[k + 1]) + 1e-15);
  }
}

TEST_CASE("cumulative simpson integrates cubics exactly at even nodes") {
  std::vector<double> f;
  for (int k = 0; k <= 8; ++k) {
    const double x = 0.25 * k;
    f.push_back(x * x * x - x + 2.0);
  }
  const auto F = cumulative_simpson(f, 0.25);
  for (int k = 0; k <= 8; k += 2) {
    const double x = 0.25 * k;
    CHECK(F[k] == doctest::Approx(x * x * x * x / 4 - x * x / 2 + 2 * x).epsilon(1e-13));
  }
}

TEST_CASE("loglog slope of a power law") {
  const std::vector<double> x{1e-4, 2e-4, 4e-4, 8e-4};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("fmt17 round-trips doubles") {
  Gen gen(13);
  for (int k = 0; k < 200; ++k) {
    const double v = gen.uniform(-1, 1) * std::pow(10.0, gen.integer(-20, 20));
    CHECK(std::stod(fmt17(v)) == v);
  }
}
