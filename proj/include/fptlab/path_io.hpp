#pragma once

// Line-oriented text format for a path and its barrier:
//
//   # comment
//   horizon 3
//   barrier constant 0              (or: barrier tabulated t0 v0 t1 v1 ...)
//   segment 0 1 -1 0                (t_start t_end intercept slope)
//   sampled 1 2 1 -1 1.5 -0.2 2 0   (t_start t_end then t v knot pairs)
//   jump 2 0 1                      (t left_limit right_value)
//
// Lines may appear in any order; segments and jumps are sorted by time.

#include <iomanip>
#include <sstream>
#include <string>

#include "fptlab/pathlab.hpp"

namespace fptlab {

struct PathFile {
  PiecewisePath path;
  Barrier barrier;
};

namespace detail {

inline std::vector<double> read_numbers(std::istringstream& is, int line_no) {
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "path file line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    }
  }
  return out;
}

}  // namespace detail

inline PathFile parse_path_file(const std::string& text) {
  std::optional<double> horizon;
  std::optional<Barrier> barrier;
  std::vector<Segment> segs;
  std::vector<Jump> jumps;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto bad = [&](const std::string& m) {
    throw Error(ErrorKind::Parse, "path file line " + std::to_string(line_no) + ": " + m);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "horizon") {
      auto v = detail::read_numbers(ls, line_no);
      if (v.size() != 1) bad("horizon takes one value");
      horizon = v[0];
    } else if (key == "barrier") {
      std::string kind;
      ls >> kind;
      auto v = detail::read_numbers(ls, line_no);
      if (kind == "constant") {
        if (v.size() != 1) bad("barrier constant takes one value");
        barrier = Barrier::constant(v[0]);
      } else if (kind == "tabulated") {
        if (v.size() < 4 || v.size() % 2 != 0) bad("barrier tabulated takes >= 2 (t, value) pairs");
        std::vector<double> t, b;
        for (std::size_t i = 0; i < v.size(); i += 2) {
          t.push_back(v[i]);
          b.push_back(v[i + 1]);
        }
        barrier = Barrier::tabulated(std::move(t), std::move(b));
      } else {
        bad("unknown barrier kind '" + kind + "'");
      }
    } else if (key == "segment") {
      auto v = detail::read_numbers(ls, line_no);
      if (v.size() != 4) bad("segment takes t_start t_end intercept slope");
      segs.push_back(Segment{v[0], v[1], AffineFn{v[2], v[3]}});
    } else if (key == "sampled") {
      auto v = detail::read_numbers(ls, line_no);
      if (v.size() < 6 || v.size() % 2 != 0) bad("sampled takes t_start t_end and >= 2 (t, value) pairs");
      SampledFn f;
      for (std::size_t i = 2; i < v.size(); i += 2) {
        f.times.push_back(v[i]);
        f.values.push_back(v[i + 1]);
      }
      segs.push_back(Segment{v[0], v[1], std::move(f)});
    } else if (key == "jump") {
      auto v = detail::read_numbers(ls, line_no);
      if (v.size() != 3) bad("jump takes t left_limit right_value");
      jumps.push_back(Jump{v[0], v[1], v[2]});
    } else {
      bad("unknown key '" + key + "'");
    }
  }
  if (!horizon) throw Error(ErrorKind::Parse, "path file: missing horizon");
  if (!barrier) throw Error(ErrorKind::Parse, "path file: missing barrier");
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.t_start < b.t_start; });
  std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.t < b.t; });
  return PathFile{PiecewisePath(std::move(segs), std::move(jumps), *horizon), std::move(*barrier)};
}

inline std::string write_path_file(const PiecewisePath& path, const Barrier& barrier) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "horizon " << path.horizon() << '\n';
  if (barrier.is_constant()) {
    os << "barrier constant " << barrier.level() << '\n';
  } else {
    os << "barrier tabulated";
    const auto& t = barrier.table();
    for (std::size_t i = 0; i < t.times.size(); ++i) os << ' ' << t.times[i] << ' ' << t.values[i];
    os << '\n';
  }
  for (const auto& s : path.segments()) {
    if (const auto* a = std::get_if<AffineFn>(&s.fn)) {
      os << "segment " << s.t_start << ' ' << s.t_end << ' ' << a->intercept << ' ' << a->slope << '\n';
    } else {
      const auto& f = std::get<SampledFn>(s.fn);
      os << "sampled " << s.t_start << ' ' << s.t_end;
      for (std::size_t i = 0; i < f.times.size(); ++i) os << ' ' << f.times[i] << ' ' << f.values[i];
      os << '\n';
    }
  }
  for (const auto& j : path.jumps()) os << "jump " << j.t << ' ' << j.left_limit << ' ' << j.right_value << '\n';
  return os.str();
}

}  // namespace fptlab
