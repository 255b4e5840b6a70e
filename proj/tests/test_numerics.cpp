#include <gtest/gtest.h>

#include <cmath>

#include "fptlab/numerics.hpp"

using namespace fptlab;

TEST(ChebyshevCell, InterpolatesPolynomialsExactly) {
  const ChebyshevCell cell(12);
  std::vector<double> v;
  for (double xi : cell.nodes()) v.push_back(std::pow(xi, 9) - 2 * xi * xi + 1);
  for (double xi : {-0.93, -0.1, 0.42, 1.0}) {
    EXPECT_NEAR(cell.interpolate(v.begin(), xi), std::pow(xi, 9) - 2 * xi * xi + 1, 1e-13);
  }
}

TEST(ChebyshevCell, IntegrationMatrixRows) {
  const ChebyshevCell cell(12);
  std::vector<double> v;
  for (double xi : cell.nodes()) v.push_back(std::cos(xi));
  for (int j = 0; j < cell.size(); ++j) {
    double s = 0.0, t = 0.0;
    for (int i = 0; i < cell.size(); ++i) {
      s += cell.S(j, i) * v[i];
      t += cell.T(j, i) * v[i];
    }
    const double xi = cell.nodes()[j];
    EXPECT_NEAR(s, std::sin(xi) - std::sin(-1.0), 1e-12);
    EXPECT_NEAR(t, std::sin(1.0) - std::sin(xi), 1e-12);
  }
  EXPECT_NEAR(cell.integrate_to(v.begin(), 0.3), std::sin(0.3) + std::sin(1.0), 1e-12);
}

TEST(ChebyshevCell, NodesIncludeEndpoints) {
  const ChebyshevCell cell(5);
  EXPECT_DOUBLE_EQ(cell.nodes().front(), -1.0);
  EXPECT_DOUBLE_EQ(cell.nodes().back(), 1.0);
}

TEST(CompositeGauss, SmoothIntegrands) {
  EXPECT_NEAR(composite_gauss([](double x) { return std::exp(-x); }, 0.0, 5.0), 1.0 - std::exp(-5.0), 1e-14);
  EXPECT_NEAR(composite_gauss([](double x) { return x * x; }, -1.0, 2.0, 0.3), 3.0, 1e-13);
  EXPECT_DOUBLE_EQ(composite_gauss([](double) { return 1.0; }, 1.0, 1.0), 0.0);
}

TEST(FiniteDifferences, Orders) {
  const std::function<double(double)> f = [](double x) { return std::sin(2 * x); };
  const double x = 0.4, h = 1e-3;
  EXPECT_NEAR(fd::d1(f, x, h), 2 * std::cos(2 * x), 1e-10);
  EXPECT_NEAR(fd::d2(f, x, h), -4 * std::sin(2 * x), 1e-7);
  EXPECT_NEAR(fd::d3(f, x, 1e-2), -8 * std::cos(2 * x), 1e-5);
  EXPECT_NEAR(fd::d1_backward(f, x, h), 2 * std::cos(2 * x), 1e-9);
  EXPECT_NEAR(fd::d2_backward(f, x, h), -4 * std::sin(2 * x), 1e-5);
  EXPECT_NEAR(fd::d3_backward(f, x, 1e-2), -8 * std::cos(2 * x), 1e-3);
}
