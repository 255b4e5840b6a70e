#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fptlab/specfun.hpp"

using namespace fptlab;

namespace {

struct PcfOracle {
  double nu;
  double z;
  double value;
};

// mpmath pcfd at 40 digits, regenerated by tests/oracles/gen_pcf.py.
constexpr PcfOracle kOracle[] = {
#include "pcf_oracle_values.inc"
};

}  // namespace

TEST(Pcf, MatchesHighPrecisionOracle) {
  for (const auto& o : kOracle) {
    const double v = pcf_d(o.nu, o.z);
    EXPECT_NEAR(v / o.value, 1.0, 1e-10) << "nu=" << o.nu << " z=" << o.z;
  }
}

TEST(Pcf, ErfcClosedFormAtMinusOne) {
  for (double z : {-5.0, -2.0, 0.0, 1.0, 3.0, 5.0}) {
    const double exact = std::exp(0.25 * z * z) * std::sqrt(std::numbers::pi / 2.0) * std::erfc(z / std::numbers::sqrt2);
    EXPECT_NEAR(pcf_d(-1.0, z) / exact, 1.0, 1e-12) << "z=" << z;
  }
}

TEST(Pcf, OrderZeroIsGaussian) {
  for (double z : {-3.0, 0.0, 2.5}) EXPECT_DOUBLE_EQ(log_pcf_d(0.0, z), -0.25 * z * z);
}

TEST(Pcf, RecurrenceInOrder) {
  // D_{nu+1} - z D_nu + nu D_{nu-1} = 0
  for (double nu : {-1.5, -2.25, -4.0}) {
    for (double z : {-2.0, 0.3, 4.0}) {
      const double lhs = pcf_d(nu + 1.0, z) - z * pcf_d(nu, z) + nu * pcf_d(nu - 1.0, z);
      const double scale = std::abs(pcf_d(nu + 1.0, z)) + std::abs(z * pcf_d(nu, z)) + std::abs(nu * pcf_d(nu - 1.0, z));
      EXPECT_LT(std::abs(lhs) / scale, 1e-10) << "nu=" << nu << " z=" << z;
    }
  }
}

TEST(Pcf, DerivativeMatchesCentralDifference) {
  for (double nu : {-1.2, -3.7}) {
    for (double z : {-3.0, 0.0, 2.0}) {
      const double h = 1e-3;
      const double fd = (-pcf_d(nu, z + 2 * h) + 8 * pcf_d(nu, z + h) - 8 * pcf_d(nu, z - h) + pcf_d(nu, z - 2 * h)) /
                        (12 * h);
      EXPECT_NEAR(pcf_d_derivative(nu, z) / fd, 1.0, 1e-8);
    }
  }
}

TEST(Pcf, WeberEquationResidual) {
  const double nu = -2.6, h = 1e-3;
  for (double z : {-2.0, 0.5, 3.0}) {
    const double d2 = (pcf_d(nu, z + h) - 2 * pcf_d(nu, z) + pcf_d(nu, z - h)) / (h * h);
    const double res = d2 + (nu + 0.5 - 0.25 * z * z) * pcf_d(nu, z);
    EXPECT_LT(std::abs(res) / std::abs(d2 + pcf_d(nu, z)), 1e-5);
  }
}

TEST(Pcf, LargeArgumentsStayFiniteInLogSpace) {
  const double v = log_pcf_d(-3.0, 40.0);
  // D_nu(z) ~ z^nu e^{-z^2/4}
  EXPECT_NEAR(v, -3.0 * std::log(40.0) - 400.0, 1e-2);
  EXPECT_TRUE(std::isfinite(log_pcf_d(-3.0, -40.0)));
}

TEST(Pcf, RejectsPositiveOrder) {
  try {
    pcf_d(0.5, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(WeberContext, ReferenceCoefficients) {
  const ModelParams p;
  const auto c = make_context(p, 0.0);
  EXPECT_DOUBLE_EQ(c.b, 0.5);
  EXPECT_NEAR(c.nu_q, -1.0 - 1.0 / 0.5, 1e-15);
  EXPECT_NEAR(c.p2, 0.5 / (2 * 0.09), 1e-15);
  EXPECT_NEAR(c.z1, -std::sqrt(1.0) / 0.3, 1e-14);
  const auto cq = make_context(p, 0.1);
  EXPECT_LT(cq.nu_q, c.nu_q);
}

TEST(WeberContext, RejectsNonMeanRevertingDrift) {
  ModelParams p;
  p.beta = 0.1;
  try {
    make_context(p, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
  }
  EXPECT_THROW(make_context(ModelParams{}, -0.1), Error);
}
