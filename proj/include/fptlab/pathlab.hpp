#pragma once

// Piecewise càdlàg paths against continuous barriers: first passage, the
// fourfold mode split, running supremum, the running-supremum announcing
// sequence, restricted times and the no-premature-contact check.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "fptlab/core.hpp"

namespace fptlab {

/// x(t) = intercept + slope * t, in absolute time.
struct AffineFn {
  double intercept = 0.0;
  double slope = 0.0;
  double operator()(double t) const { return intercept + slope * t; }
};

/// Linear interpolation through knots spanning exactly the owning segment.
struct SampledFn {
  std::vector<double> times;
  std::vector<double> values;

  double operator()(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return values.front();
    if (it == times.end()) return values.back();
    const auto i = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
  }
};

struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  std::variant<AffineFn, SampledFn> fn;

  double value(double t) const {
    return std::visit([t](const auto& f) { return f(t); }, fn);
  }
};

struct Jump {
  double t = 0.0;
  double left_limit = 0.0;
  double right_value = 0.0;
};

namespace detail {
inline bool close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}
}  // namespace detail

/// Càdlàg path on [0, horizon] made of continuous segments joined at
/// declared jumps. Every discontinuity must be declared as a jump.
class PiecewisePath {
 public:
  PiecewisePath(std::vector<Segment> segments, std::vector<Jump> jumps, double horizon)
      : segments_(std::move(segments)), jumps_(std::move(jumps)), horizon_(horizon) {
    validate();
  }

  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  double horizon() const { return horizon_; }

  /// X_t (right-continuous value).
  double value(double t) const { return segments_[segment_index(t)].value(t); }

  /// X_{t-}; X_{0-} := X_0.
  double left_limit(double t) const {
    if (t <= segments_.front().t_start) return value(t);
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                               [](const Segment& s, double v) { return s.t_end < v; });
    if (it == segments_.end()) --it;
    return it->value(t);
  }

  /// Index of the segment whose half-open interval [t_start, t_end) holds t;
  /// the horizon belongs to the last segment.
  std::size_t segment_index(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.t_start; });
    if (it == segments_.begin()) return 0;
    return static_cast<std::size_t>(it - segments_.begin()) - 1;
  }

  /// Convenience builder from (t_start, t_end, intercept, slope) rows.
  static PiecewisePath from_affine(const std::vector<std::array<double, 4>>& rows,
                                   std::vector<Jump> jumps, double horizon) {
    std::vector<Segment> segs;
    segs.reserve(rows.size());
    for (const auto& r : rows) segs.push_back(Segment{r[0], r[1], AffineFn{r[2], r[3]}});
    return PiecewisePath(std::move(segs), std::move(jumps), horizon);
  }

 private:
  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Structural, "path: " + m); };
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) fail("horizon must be positive and finite");
    if (segments_.empty()) fail("no segments");
    if (segments_.front().t_start != 0.0) fail("first segment must start at 0");
    if (!detail::close(segments_.back().t_end, horizon_, 1e-12)) fail("segments must end at the horizon");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const auto& s = segments_[i];
      if (!(s.t_end > s.t_start)) fail("segment with empty interval");
      if (i > 0 && s.t_start != segments_[i - 1].t_end) fail("segments not contiguous");
      if (const auto* f = std::get_if<SampledFn>(&s.fn)) {
        if (f->times.size() < 2 || f->times.size() != f->values.size())
          fail("sampled segment needs >= 2 matching knots");
        if (f->times.front() != s.t_start || f->times.back() != s.t_end)
          fail("sampled knots must span the segment");
        for (std::size_t k = 1; k < f->times.size(); ++k)
          if (!(f->times[k] > f->times[k - 1])) fail("sampled knots not strictly increasing");
      }
    }
    for (std::size_t j = 0; j < jumps_.size(); ++j) {
      const auto& jp = jumps_[j];
      if (j > 0 && !(jp.t > jumps_[j - 1].t)) fail("jump times not strictly increasing");
      auto it = std::find_if(segments_.begin() + 1, segments_.end(),
                             [&](const Segment& s) { return s.t_start == jp.t; });
      if (it == segments_.end()) fail("jump at t=" + std::to_string(jp.t) + " is not at a segment boundary");
      if (!detail::close((it - 1)->value(jp.t), jp.left_limit)) fail("jump left_limit mismatch at t=" + std::to_string(jp.t));
      if (!detail::close(it->value(jp.t), jp.right_value)) fail("jump right_value mismatch at t=" + std::to_string(jp.t));
    }
    for (std::size_t i = 1; i < segments_.size(); ++i) {
      const double t = segments_[i].t_start;
      const double l = segments_[i - 1].value(t);
      const double r = segments_[i].value(t);
      if (!detail::close(l, r)) {
        bool declared = std::any_of(jumps_.begin(), jumps_.end(), [t](const Jump& jp) { return jp.t == t; });
        if (!declared) fail("undeclared discontinuity at t=" + std::to_string(t));
      }
    }
  }

  std::vector<Segment> segments_;
  std::vector<Jump> jumps_;
  double horizon_;
};

/// Continuous barrier b(t): a constant level or a linearly interpolated table.
class Barrier {
 public:
  static Barrier constant(double level) { return Barrier(level); }

  static Barrier tabulated(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size())
      throw Error(ErrorKind::Structural, "barrier: needs >= 2 matching knots");
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (!(knots[i] > knots[i - 1])) throw Error(ErrorKind::Structural, "barrier: knots not strictly increasing");
    Barrier b(0.0);
    b.table_ = SampledFn{std::move(knots), std::move(values)};
    return b;
  }

  bool is_constant() const { return !table_.has_value(); }
  double level() const { return level_; }
  const SampledFn& table() const { return *table_; }

  double operator()(double t) const { return table_ ? (*table_)(t) : level_; }

  /// Barrier knot times strictly inside (0, horizon).
  std::vector<double> breakpoints(double horizon) const {
    std::vector<double> out;
    if (table_)
      for (double k : table_->times)
        if (k > 0.0 && k < horizon) out.push_back(k);
    return out;
  }

  void check_covers(double horizon) const {
    if (table_ && (table_->times.front() > 0.0 || table_->times.back() < horizon))
      throw Error(ErrorKind::Structural, "barrier: table does not cover [0, horizon]");
  }

 private:
  explicit Barrier(double level) : level_(level) {}
  double level_;
  std::optional<SampledFn> table_;
};

struct PathOptions {
  /// Equality tolerance for the Y = 0 tests. Exactly representable affine
  /// paths can use the default; sampled paths usually need more.
  double eps_mode = 1e-12;
};

struct CrossingRecord {
  double tau = kNever;
  double y_minus = std::numeric_limits<double>::quiet_NaN();
  double y_at = std::numeric_limits<double>::quiet_NaN();
  Mode mode = Mode::NoCrossing;
};

struct AnnouncingReport {
  std::vector<double> sigma;  // sigma_1 .. sigma_{n_max}
  std::vector<double> rho;    // rho_n = min(sigma_n, n)
  double tau = kNever;        // first-passage time
  double tau_L = kNever;
  /// lim sigma_n = inf{t : S_t >= 0}, computed exactly on the piecewise path.
  double sigma_limit = kNever;
  bool converged = false;
};

struct RestrictedTimes {
  double tau_L = kNever;
  double tau_G = kNever;
};

struct PrematureContact {
  bool holds = true;
  std::optional<double> witness;
};

namespace detail {

/// Y = X - b on a maximal interval [u, v] where both are affine.
struct YPiece {
  double u;
  double v;
  double y_u;       // Y_u (right value)
  double y_v_left;  // Y_{v-}
};

inline std::vector<YPiece> y_pieces(const PiecewisePath& path, const Barrier& barrier) {
  const double h = path.horizon();
  barrier.check_covers(h);
  std::vector<double> knots{0.0, h};
  for (const auto& s : path.segments()) {
    knots.push_back(s.t_start);
    if (const auto* f = std::get_if<SampledFn>(&s.fn))
      knots.insert(knots.end(), f->times.begin(), f->times.end());
  }
  for (double k : barrier.breakpoints(h)) knots.push_back(k);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  std::vector<YPiece> pieces;
  pieces.reserve(knots.size());
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double u = knots[i];
    const double v = knots[i + 1];
    const auto& seg = path.segments()[path.segment_index(u)];
    pieces.push_back({u, v, seg.value(u) - barrier(u), seg.value(v) - barrier(v)});
  }
  return pieces;
}

/// Time in (u, v] where the affine piece from y_u to y_v_left reaches level.
inline double linear_root(double u, double v, double y_u, double y_v_left, double level) {
  const double t = u + (v - u) * (level - y_u) / (y_v_left - y_u);
  return std::clamp(t, u, v);
}

inline double left_value_at(const std::vector<YPiece>& pieces, std::size_t i) {
  return i == 0 ? pieces[0].y_u : pieces[i - 1].y_v_left;
}

}  // namespace detail

/// Fourfold classification from (Y_{tau-}, Y_tau).
inline Mode classify_mode(const CrossingRecord& r, const PathOptions& opt = {}) {
  if (is_never(r.tau)) return Mode::NoCrossing;
  const double eps = opt.eps_mode;
  // Start strictly above the barrier: Y_{0-} := Y_0 > 0, counted as J+.
  if (r.tau == 0.0 && r.y_minus == r.y_at && r.y_at > eps) return Mode::JPlus;
  if (r.y_minus > eps || r.y_at < -eps) {
    std::ostringstream os;
    os << "crossing record violates Y_{tau-} <= 0 <= Y_tau (y_minus=" << r.y_minus
       << ", y_at=" << r.y_at << ")";
    throw Error(ErrorKind::Inconsistent, os.str());
  }
  const bool left_zero = std::abs(r.y_minus) <= eps;
  const bool at_zero = std::abs(r.y_at) <= eps;
  if (left_zero) return at_zero ? Mode::C0 : Mode::CPlus;
  return at_zero ? Mode::J0 : Mode::JPlus;
}

/// First t in [0, horizon] with X_t >= b(t), with exact left/right values.
inline CrossingRecord first_passage(const PiecewisePath& path, const Barrier& barrier,
                                    const PathOptions& opt = {}) {
  const double eps = opt.eps_mode;
  const auto pieces = detail::y_pieces(path, barrier);
  CrossingRecord rec;
  auto finish = [&](double tau, double ym, double ya) {
    rec.tau = tau;
    rec.y_minus = ym;
    rec.y_at = ya;
    rec.mode = classify_mode(rec, opt);
    return rec;
  };
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    if (p.y_u >= -eps) return finish(p.u, detail::left_value_at(pieces, i), p.y_u);
    if (p.y_v_left > eps) return finish(detail::linear_root(p.u, p.v, p.y_u, p.y_v_left, 0.0), 0.0, 0.0);
    // |Y_{v-}| <= eps: contact at v, resolved by the next piece's right value.
  }
  const auto& last = pieces.back();
  if (last.y_v_left >= -eps) return finish(last.v, last.y_v_left, last.y_v_left);
  return rec;
}

/// S_t = sup_{s <= t} Y_s as a nondecreasing piecewise path (in Y units).
inline PiecewisePath running_supremum(const PiecewisePath& path, const Barrier& barrier) {
  const auto pieces = detail::y_pieces(path, barrier);
  std::vector<Segment> segs;
  std::vector<Jump> jumps;
  auto push_flat = [&](double u, double v, double level) {
    // Merge with a preceding flat segment at the same level.
    if (!segs.empty()) {
      auto* f = std::get_if<AffineFn>(&segs.back().fn);
      if (f && f->slope == 0.0 && f->intercept == level && segs.back().t_end == u &&
          (jumps.empty() || jumps.back().t != u)) {
        segs.back().t_end = v;
        return;
      }
    }
    segs.push_back(Segment{u, v, AffineFn{level, 0.0}});
  };
  auto push_line = [&](const detail::YPiece& p, double from) {
    const double slope = (p.y_v_left - p.y_u) / (p.v - p.u);
    segs.push_back(Segment{from, p.v, AffineFn{p.y_u - slope * p.u, slope}});
  };

  double s_prev = pieces.front().y_u;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    double s_u = s_prev;
    if (i == 0 || p.y_u > s_prev) {
      if (i > 0) jumps.push_back(Jump{p.u, s_prev, p.y_u});
      s_u = p.y_u;
    }
    const bool rising = p.y_v_left > p.y_u;
    if (rising && p.y_u >= s_u) {
      push_line(p, p.u);
      s_prev = p.y_v_left;
    } else if (rising && p.y_v_left > s_u) {
      const double t_star = detail::linear_root(p.u, p.v, p.y_u, p.y_v_left, s_u);
      if (t_star > p.u) push_flat(p.u, t_star, s_u);
      if (t_star < p.v) push_line(p, t_star);
      s_prev = p.y_v_left;
    } else {
      push_flat(p.u, p.v, s_u);
      s_prev = s_u;
    }
  }
  return PiecewisePath(std::move(segs), std::move(jumps), path.horizon());
}

namespace detail {

/// inf{t : S_t >= level} on a nondecreasing piecewise path; kNever if the
/// level is not reached by the horizon.
inline double first_reach(const PiecewisePath& s, double level, double eps) {
  for (const auto& seg : s.segments()) {
    const double su = seg.value(seg.t_start);
    if (su >= level - eps) return seg.t_start;
    const double sv = seg.value(seg.t_end);
    if (sv > level + eps) return linear_root(seg.t_start, seg.t_end, su, sv, level);
    if (sv >= level - eps) return seg.t_end;
  }
  return kNever;
}

}  // namespace detail

inline RestrictedTimes restricted_times(const CrossingRecord& r) {
  RestrictedTimes out;
  if (is_left_contact(r.mode)) out.tau_L = r.tau;
  if (is_gap(r.mode)) out.tau_G = r.tau;
  return out;
}

/// sigma_n = inf{t : S_t >= -1/n}, rho_n = min(sigma_n, n).
///
/// `converged` reports whether sigma_n increases to tau: on left-contact
/// paths this is rho_n increasing to tau_L; on gap paths the sigma_n
/// then do not lock onto any time strictly before tau; with no crossing
/// S never reaches 0 so sigma_n (and rho_n) escape to infinity.
inline AnnouncingReport announcing_sequence(const PiecewisePath& path, const Barrier& barrier,
                                            int n_max, const PathOptions& opt = {}) {
  require(n_max >= 1, ErrorKind::Domain, "announcing_sequence: n_max must be >= 1");
  const auto sup = running_supremum(path, barrier);
  const auto rec = first_passage(path, barrier, opt);
  AnnouncingReport rep;
  rep.sigma.reserve(static_cast<std::size_t>(n_max));
  rep.rho.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const double sig = detail::first_reach(sup, -1.0 / n, 0.0);
    rep.sigma.push_back(sig);
    rep.rho.push_back(std::min(sig, static_cast<double>(n)));
  }
  rep.tau = rec.tau;
  rep.tau_L = restricted_times(rec).tau_L;
  rep.sigma_limit = detail::first_reach(sup, 0.0, opt.eps_mode);
  if (is_never(rep.tau)) {
    rep.converged = is_never(rep.sigma_limit);
  } else {
    rep.converged = !is_never(rep.sigma_limit) &&
                    std::abs(rep.sigma_limit - rep.tau) <= 1e-9 * std::max(1.0, rep.tau);
  }
  return rep;
}

/// Whether Y_{u-} < 0 for every u < tau; otherwise the first time u < tau
/// with Y_{u-} = 0 > Y_u.
inline PrematureContact check_no_premature_contact(const PiecewisePath& path, const Barrier& barrier,
                                                   const PathOptions& opt = {}) {
  const auto rec = first_passage(path, barrier, opt);
  for (const auto& jp : path.jumps()) {
    if (!(jp.t < rec.tau)) break;
    const double b = barrier(jp.t);
    if (std::abs(jp.left_limit - b) <= opt.eps_mode && jp.right_value - b < -opt.eps_mode)
      return PrematureContact{false, jp.t};
  }
  return PrematureContact{true, std::nullopt};
}

}  // namespace fptlab
