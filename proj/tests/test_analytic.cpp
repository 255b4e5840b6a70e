#include <gtest/gtest.h>

#include <cmath>

#include "fptlab/analytic.hpp"

using namespace fptlab;

namespace {

const ModelParams kRef{};

const VolterraSolution& solution(double q) {
  static std::map<double, VolterraSolution> cache;
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, solve_wq(kRef, q)).first;
  return it->second;
}

}  // namespace

TEST(ClosedForm, BoundaryValuesAndRange) {
  const OvershootClosedForm cf(kRef);
  EXPECT_DOUBLE_EQ(cf.value(kRef.a), 0.0);
  EXPECT_NEAR(cf.value(0.0), 0.789204514403, 1e-11);
  for (double x : {-3.0, -1.0, 0.0, 0.5, 0.99}) {
    EXPECT_GT(cf.value(x), 0.0);
    EXPECT_LT(cf.value(x), 1.0);
  }
  EXPECT_NEAR(creeping_prob(kRef, 0.0) + g0(kRef, 0.0), 1.0, 1e-15);
}

TEST(ClosedForm, CumulativeValuesMatchPointwise) {
  const OvershootClosedForm cf(kRef);
  const std::vector<double> xs{-2.0, -0.5, 0.0, 0.37, 0.9, 1.0};
  const auto v = cf.values(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(v[i], cf.value(xs[i]), 1e-14);
}

TEST(ClosedForm, SlopeIsLimitOfDerivative) {
  const OvershootClosedForm cf(kRef);
  EXPECT_NEAR(-cf.prime(kRef.a), cf.slope(), 1e-12 * cf.slope());
  EXPECT_NEAR(boundary_slope(kRef), 8.46512296517, 1e-9);
}

TEST(ClosedForm, CompatibilityAtBarrier) {
  auto g = [](double x) { return g0(kRef, x); };
  EXPECT_LT(std::abs(compatibility_residual(kRef, g)), 1e-6);
}

TEST(HomogeneousBasis, WronskianConstantAndConsistent) {
  for (double q : {0.0, 0.3}) {
    const HomogeneousBasis basis(kRef, q);
    for (double x : {-2.0, 0.0, 0.8}) {
      EXPECT_NEAR(basis.wronskian_direct(x) / basis.wronskian(x), 1.0, 1e-8);
    }
    const auto& c = basis.context();
    EXPECT_NEAR(basis.kernel_constant(), c.z1 * std::sqrt(2 * std::numbers::pi) / std::tgamma(-c.nu_q),
                1e-12 * std::abs(basis.kernel_constant()));
  }
}

TEST(HomogeneousBasis, ChiSatisfiesBoundaryCondition) {
  for (double q : {0.0, 0.05, 0.5}) {
    const HomogeneousBasis basis(kRef, q);
    const double bchi = basis.boundary_operator(basis.chi(kRef.a), basis.chi_prime(kRef.a));
    EXPECT_LT(std::abs(bchi), 1e-10 * std::abs(basis.boundary_psi()));
    EXPECT_NEAR(basis.boundary_operator(basis.psi(kRef.a), basis.psi_prime(kRef.a)), basis.boundary_psi(),
                1e-8 * std::abs(basis.boundary_psi()));
  }
}

TEST(HomogeneousBasis, WeberResidualSmall) {
  const HomogeneousBasis basis(kRef, 0.05);
  auto psi = [&](double y) { return basis.psi(y); };
  auto chi = [&](double y) { return basis.chi(y); };
  for (double x : {-1.5, 0.0, 0.9}) {
    EXPECT_LT(weber_residual(basis, psi, x, 1e-3).relative(), 1e-6);
    EXPECT_LT(weber_residual(basis, chi, x, 1e-3).relative(), 1e-6);
  }
}

TEST(HomogeneousBasis, GreenKernelJumpCondition) {
  // Continuous across the diagonal.
  const HomogeneousBasis basis(kRef, 0.1);
  const double y = 0.2, e = 1e-7;
  EXPECT_NEAR(green_kernel(basis, y - e, y), green_kernel(basis, y + e, y),
              1e-5 * std::abs(green_kernel(basis, y, y)));
}

TEST(Volterra, CollapsesToClosedFormAtZeroRate) {
  const auto& sol = solution(0.0);
  EXPECT_EQ(sol.iterations, 1);
  const auto closed = OvershootClosedForm(kRef).values(sol.grid);
  for (std::size_t i = 0; i < sol.grid.size(); i += 37) EXPECT_NEAR(sol.g(sol.grid[i]), closed[i], 1e-12);
}

TEST(Volterra, ConvergesAndDecreasesInRate) {
  double prev = g0(kRef, 0.0);
  for (double q : {0.01, 0.05, 0.1}) {
    const auto& sol = solution(q);
    EXPECT_TRUE(sol.converged);
    EXPECT_LT(sol.contraction_ratio, 0.5);
    const double g = gq_from_solution(sol, 0.0);
    EXPECT_LT(g, prev);
    EXPECT_GT(g, 0.0);
    prev = g;
  }
  EXPECT_NEAR(gq_from_solution(solution(0.05), 0.0), 0.688147299566, 1e-9);
}

TEST(Volterra, OideAndThirdOrderResiduals) {
  const double q = 0.05;
  const auto& sol = solution(q);
  auto g = [&](double y) { return sol.g(y); };
  for (double x : {-3.0, -1.0, 0.0, 0.5, 0.95}) {
    EXPECT_LT(std::abs(oide_residual(kRef, q, g, x)), 1e-7);
    EXPECT_LT(third_order_residual(kRef, q, g, x).relative(), 1e-4);
  }
  EXPECT_LT(std::abs(compatibility_residual(kRef, g)), 1e-6);
  EXPECT_DOUBLE_EQ(g(kRef.a), 0.0);
}

TEST(Volterra, TruncationAndDomain) {
  VolterraOptions opt;
  opt.estimate_truncation = true;
  const auto sol = solve_wq(kRef, 0.1, opt);
  EXPECT_LT(sol.truncation_error, 1e-10);
  EXPECT_THROW(gq_from_solution(sol, sol.x_min - 1.0), Error);
}

TEST(Volterra, ReportsNonConvergence) {
  VolterraOptions opt;
  opt.max_iter = 2;
  try {
    solve_wq(kRef, 0.1, opt);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Convergence);
    EXPECT_GT(e.diagnostic(), 0.0);
  }
}

TEST(Volterra, SmallRateSlopePositive) {
  const double m = small_q_slope(kRef, 0.0, 0.01);
  EXPECT_NEAR(m, (g0(kRef, 0.0) - 0.766968936677) / 0.01, 1e-6);
  EXPECT_GT(m, 0.0);
}
