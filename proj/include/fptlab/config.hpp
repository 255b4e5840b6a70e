#pragma once

// Run configuration: INI sections [model], [sim], [analytic], [volterra],
// [acceptance]. Every key is optional; `section.key=value` overrides win over
// the file.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fptlab/analytic.hpp"
#include "fptlab/model.hpp"

namespace fptlab {

struct AcceptanceConfig {
  std::uint64_t random_paths = 20;
  std::uint64_t compound_paths = 100000;
  double compound_horizon = 50.0;
  std::uint64_t residual_points = 40;
};

struct RunConfig {
  ModelParams model;
  SimConfig sim;
  std::vector<double> q_list{0.01, 0.05, 0.1};
  std::vector<double> x_list{0.0, 0.5, 0.9, 0.99};
  VolterraOptions volterra;
  AcceptanceConfig acceptance;

  void validate() const {
    model.validate();
    sim.validate();
    for (double q : q_list) require(q >= 0.0, ErrorKind::Domain, "config: q_list entries must be >= 0");
    for (double x : x_list) require(x <= model.a, ErrorKind::Domain, "config: x_list entries must be <= a");
    require(volterra.tol > 0.0 && volterra.max_iter >= 1, ErrorKind::Domain, "config: bad volterra tolerance/max_iter");
    require(acceptance.random_paths >= 1, ErrorKind::Domain, "config: acceptance.random_paths must be >= 1");
  }
};

/// 12 significant digits, as used in every table and report.
inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_num(v[i]);
  return s;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Parse, "config: " + key + " expects a number, got '" + v + "'");
}

inline std::uint64_t parse_count(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1e18)
    throw Error(ErrorKind::Parse, "config: " + key + " expects a nonnegative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorKind::Parse, "config: " + key + " expects a boolean, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

inline void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
  const std::map<std::string, double*> reals{
      {"model.alpha", &c.model.alpha},     {"model.beta", &c.model.beta},
      {"model.sigma", &c.model.sigma},     {"model.lambda", &c.model.lambda},
      {"model.eta", &c.model.eta},         {"model.a", &c.model.a},
      {"model.x", &c.model.x},             {"sim.horizon", &c.sim.horizon},
      {"sim.step", &c.sim.step},           {"volterra.tol", &c.volterra.tol},
      {"volterra.max_cell", &c.volterra.max_cell}, {"volterra.cut_ratio", &c.volterra.cut_ratio},
      {"acceptance.compound_horizon", &c.acceptance.compound_horizon},
  };
  const std::map<std::string, std::uint64_t*> counts{
      {"sim.seed", &c.sim.seed},
      {"sim.n_paths", &c.sim.n_paths},
      {"acceptance.random_paths", &c.acceptance.random_paths},
      {"acceptance.compound_paths", &c.acceptance.compound_paths},
      {"acceptance.residual_points", &c.acceptance.residual_points},
  };
  if (auto it = reals.find(key); it != reals.end()) {
    *it->second = parse_double(key, value);
  } else if (auto jt = counts.find(key); jt != counts.end()) {
    *jt->second = parse_count(key, value);
  } else if (key == "sim.bridge_correction") {
    c.sim.bridge_correction = parse_bool(key, value);
  } else if (key == "analytic.q_list") {
    c.q_list = parse_list(key, value);
  } else if (key == "analytic.x_list") {
    c.x_list = parse_list(key, value);
  } else if (key == "volterra.max_iter") {
    c.volterra.max_iter = static_cast<int>(parse_count(key, value));
  } else if (key == "volterra.nodes_per_cell") {
    c.volterra.nodes_per_cell = static_cast<int>(parse_count(key, value));
  } else {
    throw Error(ErrorKind::Parse, "config: unknown key '" + key + "'");
  }
}

}  // namespace detail

/// Apply one `section.key=value` override.
inline void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::Parse, "override '" + assignment + "' is not section.key=value");
  detail::apply_key(c, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

inline RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {}) {
  RunConfig c;
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Parse, std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw Error(ErrorKind::Parse, "config: key '" + section + "' outside any section");
    for (const auto& [key, value] : body) detail::apply_key(c, section + "." + key, value.data());
  }
  for (const auto& o : overrides) apply_override(c, o);
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Parse, "config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

/// Line-oriented key=value report; insertion order is preserved.
class Report {
 public:
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, fmt_num(value)); }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }

  void add_config(const RunConfig& c) {
    add("config.model.alpha", c.model.alpha);
    add("config.model.beta", c.model.beta);
    add("config.model.sigma", c.model.sigma);
    add("config.model.lambda", c.model.lambda);
    add("config.model.eta", c.model.eta);
    add("config.model.a", c.model.a);
    add("config.model.x", c.model.x);
    add("config.sim.horizon", c.sim.horizon);
    add("config.sim.step", c.sim.step);
    add("config.sim.seed", c.sim.seed);
    add("config.sim.bridge_correction", c.sim.bridge_correction);
    add("config.sim.n_paths", c.sim.n_paths);
    add("config.analytic.q_list", fmt_list(c.q_list));
    add("config.analytic.x_list", fmt_list(c.x_list));
    add("config.volterra.tol", c.volterra.tol);
    add("config.volterra.max_iter", c.volterra.max_iter);
    add("config.volterra.nodes_per_cell", c.volterra.nodes_per_cell);
    add("config.volterra.max_cell", c.volterra.max_cell);
    add("config.volterra.cut_ratio", c.volterra.cut_ratio);
    add("config.acceptance.random_paths", c.acceptance.random_paths);
    add("config.acceptance.compound_paths", c.acceptance.compound_paths);
    add("config.acceptance.compound_horizon", c.acceptance.compound_horizon);
    add("config.acceptance.residual_points", c.acceptance.residual_points);
  }

  std::string str() const {
    std::string s;
    for (const auto& [k, v] : lines_) s += k + "=" + v + "\n";
    return s;
  }

  const std::vector<std::pair<std::string, std::string>>& lines() const { return lines_; }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

}  // namespace fptlab
