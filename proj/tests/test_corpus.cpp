#include <gtest/gtest.h>

#include "fptlab/corpus.hpp"

using namespace fptlab;

TEST(Corpus, LeftContactThenJumpIsCPlus) {
  const auto pf = parse_path_file(std::string(kLeftContactThenJumpPath));
  const auto rec = first_passage(pf.path, pf.barrier);
  EXPECT_EQ(rec.mode, Mode::CPlus);
  EXPECT_DOUBLE_EQ(rec.tau, 2.0);
  EXPECT_TRUE(announcing_sequence(pf.path, pf.barrier, 64).converged);
}

TEST(Corpus, PrematureContactBreaksAnnouncement) {
  const auto pf = parse_path_file(std::string(kPrematureContactPath));
  const auto pc = check_no_premature_contact(pf.path, pf.barrier);
  EXPECT_FALSE(pc.holds);
  ASSERT_TRUE(pc.witness);
  EXPECT_DOUBLE_EQ(*pc.witness, 1.0);
  const auto rep = announcing_sequence(pf.path, pf.barrier, 64);
  EXPECT_FALSE(rep.converged);
  EXPECT_DOUBLE_EQ(rep.tau, 2.0);
  EXPECT_DOUBLE_EQ(rep.sigma_limit, 1.0);
  for (double s : rep.sigma) EXPECT_LE(s, 1.0);
}

TEST(Corpus, GeneratedPathsAreDeterministic) {
  const auto a = random_piecewise_path(5, 3, false), b = random_piecewise_path(5, 3, false);
  EXPECT_EQ(write_path_file(a.path, a.barrier), write_path_file(b.path, b.barrier));
}

TEST(Corpus, CompliantPathsAnnounce) {
  int kinds[5] = {};
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto g = random_piecewise_path(11, i, false);
    ++kinds[static_cast<int>(g.kind)];
    EXPECT_TRUE(check_no_premature_contact(g.path, g.barrier).holds) << i;
    EXPECT_TRUE(announcing_sequence(g.path, g.barrier, 256).converged) << i;
  }
  for (int k : kinds) EXPECT_GT(k, 0);
}

TEST(Corpus, PrematurePathsDoNotAnnounce) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto g = random_piecewise_path(11, i, true);
    ASSERT_TRUE(g.planted_contact);
    const auto pc = check_no_premature_contact(g.path, g.barrier);
    EXPECT_FALSE(pc.holds) << i;
    EXPECT_FALSE(announcing_sequence(g.path, g.barrier, 256).converged) << i;
  }
}
