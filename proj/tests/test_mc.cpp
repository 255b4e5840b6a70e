#include <gtest/gtest.h>

#include <cmath>

#include "fptlab/analytic.hpp"
#include "fptlab/mc.hpp"

using namespace fptlab;

TEST(ParallelMap, OrderAndIndependenceFromWorkers) {
  auto f = [](std::uint64_t i) { return CounterRng(1, i, Stream::Synthetic).uniform(0); };
  const auto a = parallel_map(1000, 1, f), b = parallel_map(1000, 3, f);
  EXPECT_EQ(a, b);
  EXPECT_THROW(parallel_map(10, 2,
                            [](std::uint64_t i) -> int {
                              if (i == 7) throw Error(ErrorKind::Domain, "boom");
                              return 0;
                            }),
               Error);
}

TEST(Statistics, SampleEstimateAndZ) {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto e = sample_estimate(xs);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_DOUBLE_EQ(z_score(1.0, 0.3, 1.5, 0.4), 1.0);
  EXPECT_DOUBLE_EQ(z_score(1.0, 0.0, 1.0, 0.0), 0.0);
  const auto f = frequency(25, 100);
  EXPECT_DOUBLE_EQ(f.mean, 0.25);
  EXPECT_NEAR(f.std_error, std::sqrt(0.25 * 0.75 / 100), 1e-6);
}

TEST(Statistics, KolmogorovTail) {
  EXPECT_DOUBLE_EQ(kolmogorov_tail(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_tail(1.36), 0.0494, 5e-4);  // classical 5% point
  EXPECT_NEAR(kolmogorov_tail(1.63), 0.0098, 5e-4);  // classical 1% point
}

TEST(Statistics, KsAcceptsAndRejects) {
  const CounterRng r(4, 0, Stream::Synthetic);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(-std::log(r.uniform(i)) / 2.0);
  EXPECT_GT(ks_test_exponential(xs, 2.0).p_value, 0.001);
  EXPECT_LT(ks_test_exponential(xs, 1.5).p_value, 1e-6);
  xs.resize(50);
  try {
    ks_test_exponential(xs, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnderSample);
  }
}

TEST(Batch, WorkerCountDoesNotChangeEstimates) {
  const ModelParams p;
  SimConfig cfg;
  cfg.n_paths = 400;
  const auto a = simulate_batch(p, cfg, {0.05}, 1), b = simulate_batch(p, cfg, {0.05}, 3);
  EXPECT_EQ(a.qs, (std::vector<double>{0.0, 0.05}));
  EXPECT_EQ(estimate_gq_compensator(a, 0.05).mean, estimate_gq_compensator(b, 0.05).mean);
  EXPECT_EQ(estimate_gq_indicator(a, 0.0).mean, estimate_gq_indicator(b, 0.0).mean);
  EXPECT_THROW(estimate_gq_compensator(a, 0.7), Error);
}

TEST(Batch, EstimatorsAgreeWithClosedFormAtSmallN) {
  const ModelParams p;
  SimConfig cfg;
  cfg.n_paths = 3000;
  const auto b = simulate_batch(p, cfg, {0.0}, 2);
  const double g = g0(p, p.x);
  const auto ind = estimate_gq_indicator(b, 0.0), comp = estimate_gq_compensator(b, 0.0);
  EXPECT_LT(z_score(g, 0, ind.mean, ind.std_error), 4.0);
  EXPECT_LT(z_score(g, 0, comp.mean, comp.std_error), 4.0);
  const auto m = estimate_mode_probs(b);
  EXPECT_NEAR(m.c0.mean + m.jplus.mean + m.censored_fraction, 1.0, 1e-12);
  const auto hf = estimate_hq_fq(b, 0.0);
  EXPECT_NEAR(hf.h.mean - hf.f.mean, ind.mean, 1e-12);
  const auto law = overshoot_law_test(b);
  EXPECT_EQ(law.n_jplus, ind.breakdown.jplus);
  EXPECT_GT(law.p_value, 1e-4);
}

TEST(CompoundPoisson, MartingaleAndModes) {
  const CompoundPoissonSpec spec{1.0, ExponentialJumps{1.0}, 2.0, 0.0};
  const auto mc = compensator_martingale_check(spec, {0.5, 1, 2, 4}, 4000, 9, 2);
  EXPECT_TRUE(mc.lambda_monotone);
  EXPECT_LT(mc.max_z, 4.0);
  const auto modes = compound_poisson_modes(CompoundPoissonSpec{1.0, ExponentialJumps{1.0}, 1.0, 0.0}, 2000, 2, 50.0, 2);
  EXPECT_EQ(modes.j0, 0u);
  EXPECT_EQ(modes.c0, 0u);
}
