#include <gtest/gtest.h>

#include "fptlab/config.hpp"

using namespace fptlab;

TEST(Config, DefaultsMatchShippedFile) {
  const auto shipped = load_config(std::string(FPTLAB_DATA_DIR) + "/default.ini");
  Report a, b;
  a.add_config(shipped);
  b.add_config(parse_config(""));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Config, SectionsAndOverrides) {
  const auto c = parse_config(
      "[model]\nalpha = 0.2\n; comment\n[sim]\nseed = 42\nbridge_correction = off\n"
      "[analytic]\nq_list = 0.5, 1\n",
      {"model.alpha=0.3", "sim.n_paths=10"});
  EXPECT_DOUBLE_EQ(c.model.alpha, 0.3);
  EXPECT_EQ(c.sim.seed, 42u);
  EXPECT_EQ(c.sim.n_paths, 10u);
  EXPECT_FALSE(c.sim.bridge_correction);
  EXPECT_EQ(c.q_list, (std::vector<double>{0.5, 1.0}));
}

TEST(Config, Errors) {
  auto kind = [](const std::string& text, std::vector<std::string> o = {}) {
    try {
      parse_config(text, o);
    } catch (const Error& e) {
      return std::string(to_string(e.kind()));
    }
    return std::string("none");
  };
  EXPECT_EQ(kind("[model]\nalpah = 1\n"), "parse");
  EXPECT_EQ(kind("[model]\nalpha = one\n"), "parse");
  EXPECT_EQ(kind("[sim]\nseed = 1.5\n"), "parse");
  EXPECT_EQ(kind("", {"model.alpha"}), "parse");
  EXPECT_EQ(kind("[model]\nsigma = -1\n"), "domain");
  EXPECT_EQ(kind("[analytic]\nq_list = -0.1\n"), "domain");
  EXPECT_EQ(kind("[analytic]\nx_list = 2\n"), "domain");
}

TEST(Report, EmbedsConfigInOrder) {
  Report r;
  r.add("first", 1.0 / 3.0);
  r.add_config(parse_config(""));
  r.add("flag", true);
  const auto s = r.str();
  EXPECT_EQ(s.rfind("first=0.333333333333\nconfig.model.alpha=0.1\n", 0), 0u);
  EXPECT_NE(s.find("config.sim.seed=20260314\n"), std::string::npos);
  EXPECT_EQ(s.substr(s.size() - 10), "flag=true\n");
}
