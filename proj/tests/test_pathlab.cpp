#include <gtest/gtest.h>

#include "fptlab/pathlab.hpp"

using namespace fptlab;

namespace {

PiecewisePath creeping_path() {
  // X = t - 1 on [0, 2], crosses 0 at t = 1 continuously.
  return PiecewisePath::from_affine({{0, 2, -1, 1}}, {}, 2);
}

}  // namespace

TEST(Pathlab, ClassifyModeFromLimits) {
  auto mode = [](double ym, double ya) {
    CrossingRecord r;
    r.tau = 1.0;
    r.y_minus = ym;
    r.y_at = ya;
    return classify_mode(r);
  };
  EXPECT_EQ(mode(0.0, 0.0), Mode::C0);
  EXPECT_EQ(mode(0.0, 0.5), Mode::CPlus);
  EXPECT_EQ(mode(-0.5, 0.0), Mode::J0);
  EXPECT_EQ(mode(-0.5, 0.5), Mode::JPlus);
  EXPECT_EQ(classify_mode(CrossingRecord{}), Mode::NoCrossing);
  try {
    mode(0.2, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Inconsistent);
  }
}

TEST(Pathlab, CreepingCrossing) {
  const auto rec = first_passage(creeping_path(), Barrier::constant(0.0));
  EXPECT_DOUBLE_EQ(rec.tau, 1.0);
  EXPECT_EQ(rec.mode, Mode::C0);
  const auto rt = restricted_times(rec);
  EXPECT_DOUBLE_EQ(rt.tau_L, 1.0);
  EXPECT_TRUE(is_never(rt.tau_G));
}

TEST(Pathlab, JumpModes) {
  // X = -1 on [0, 1), then jumps to c.
  for (auto [c, expected] : {std::pair{0.0, Mode::J0}, std::pair{0.5, Mode::JPlus}}) {
    const auto path = PiecewisePath::from_affine({{0, 1, -1, 0}, {1, 2, c, 0}}, {Jump{1, -1, c}}, 2);
    const auto rec = first_passage(path, Barrier::constant(0.0));
    EXPECT_DOUBLE_EQ(rec.tau, 1.0);
    EXPECT_EQ(rec.mode, expected);
    EXPECT_TRUE(is_never(restricted_times(rec).tau_L));
    EXPECT_DOUBLE_EQ(restricted_times(rec).tau_G, 1.0);
  }
}

TEST(Pathlab, TimeVaryingBarrier) {
  // Flat X = 0 meets b(t) = 1 - t at t = 1.
  const auto path = PiecewisePath::from_affine({{0, 2, 0, 0}}, {}, 2);
  const auto rec = first_passage(path, Barrier::tabulated({0, 2}, {1, -1}));
  EXPECT_NEAR(rec.tau, 1.0, 1e-12);
  EXPECT_EQ(rec.mode, Mode::C0);
}

TEST(Pathlab, NoCrossingAndStartAbove) {
  const auto below = PiecewisePath::from_affine({{0, 1, -1, 0}}, {}, 1);
  const auto rec = first_passage(below, Barrier::constant(0.0));
  EXPECT_TRUE(is_never(rec.tau));
  EXPECT_EQ(rec.mode, Mode::NoCrossing);
  const auto above = PiecewisePath::from_affine({{0, 1, 1, 0}}, {}, 1);
  const auto r2 = first_passage(above, Barrier::constant(0.0));
  EXPECT_DOUBLE_EQ(r2.tau, 0.0);
  EXPECT_EQ(r2.mode, Mode::JPlus);
}

TEST(Pathlab, RunningSupremumIsNondecreasing) {
  const auto path = PiecewisePath::from_affine({{0, 1, -1, 0.5}, {1, 2, 0, -0.5}, {2, 3, -2, 0.4}},
                                               {Jump{1, -0.5, -0.5}, Jump{2, -1, -1.2}}, 3);
  const auto sup = running_supremum(path, Barrier::constant(0.0));
  double prev = -kNever;
  for (double t = 0.0; t <= 3.0; t += 0.01) {
    const double s = sup.value(t);
    EXPECT_GE(s, prev - 1e-12);
    EXPECT_GE(s, path.value(t) - 1e-12);
    prev = s;
  }
}

TEST(Pathlab, AnnouncingSequenceConvergesOnCreep) {
  const auto rep = announcing_sequence(creeping_path(), Barrier::constant(0.0), 50);
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(rep.sigma[9], 1.0 - 0.1, 1e-12);
  for (std::size_t n = 1; n < rep.sigma.size(); ++n) {
    EXPECT_LT(rep.sigma[n - 1], rep.sigma[n]);
    EXPECT_LT(rep.sigma[n], rep.tau);
  }
}

TEST(Pathlab, AnnouncingSequenceEscapesWithoutCrossing) {
  const auto below = PiecewisePath::from_affine({{0, 1, -1, 0}}, {}, 1);
  const auto rep = announcing_sequence(below, Barrier::constant(0.0), 4);
  EXPECT_TRUE(rep.converged);
  EXPECT_TRUE(is_never(rep.sigma.back()));
  EXPECT_THROW(announcing_sequence(below, Barrier::constant(0.0), 0), Error);
}

TEST(Pathlab, PrematureContactWitness) {
  // Touch 0 from below at t = 1, drop, then creep up at t = 2.
  const auto path = PiecewisePath::from_affine({{0, 1, -1, 1}, {1, 2, -1, 0.5}, {2, 3, 0, 0}},
                                               {Jump{1, 0, -0.5}}, 3);
  const auto pc = check_no_premature_contact(path, Barrier::constant(0.0));
  EXPECT_FALSE(pc.holds);
  ASSERT_TRUE(pc.witness);
  EXPECT_DOUBLE_EQ(*pc.witness, 1.0);
  EXPECT_TRUE(check_no_premature_contact(creeping_path(), Barrier::constant(0.0)).holds);
}

TEST(Pathlab, RejectsMalformedPaths) {
  EXPECT_THROW(PiecewisePath::from_affine({{0, 1, 0, 0}, {1.5, 2, 0, 0}}, {}, 2), Error);
  EXPECT_THROW(PiecewisePath::from_affine({}, {}, 1), Error);
  EXPECT_THROW(Barrier::tabulated({0, 1}, {0}), Error);
}
