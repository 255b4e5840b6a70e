#pragma once

// Reference paths and a generator of random piecewise-affine paths with
// prescribed crossing behaviour.

#include <string_view>

#include "fptlab/path_io.hpp"
#include "fptlab/rng.hpp"

namespace fptlab {

inline constexpr std::string_view kLeftContactThenJumpPath =
    "# Left contact followed by an upward jump (C+).\n"
    "# X = -1 on [0,1), t - 2 on [1,2), 1 on [2,3]; barrier b = 0.\n"
    "horizon 3\n"
    "barrier constant 0\n"
    "segment 0 1 -1 0\n"
    "segment 1 2 -2 1\n"
    "segment 2 3 1 0\n"
    "jump 2 0 1\n";

inline constexpr std::string_view kPrematureContactPath =
    "# Premature left contact at t = 1: X_{1-} = 0 > X_1 = -1/2, then a\n"
    "# continuous climb back to the barrier, first passage at t = 2.\n"
    "# X = t - 1 on [0,1), (t - 2)/2 on [1,2), 0 on [2,3]; barrier b = 0.\n"
    "horizon 3\n"
    "barrier constant 0\n"
    "segment 0 1 -1 1\n"
    "segment 1 2 -1 0.5\n"
    "segment 2 3 0 0\n"
    "jump 1 0 -0.5\n";

enum class CrossingKind { Creep, ContactThenJump, ExactJump, OvershootJump, None };

struct GeneratedPath {
  PiecewisePath path;
  Barrier barrier;
  CrossingKind kind = CrossingKind::None;
  /// Time of the planted downward jump from the barrier, if any.
  std::optional<double> planted_contact;
};

/// Random path on [0, 4] with K in {4, 8} affine segments and a piecewise
/// linear barrier with knots at the segment ends. Before the crossing segment
/// Y = X - b stays in [-2, -1/4]. With `premature` set, one breakpoint before
/// the crossing gets Y_{t-} = 0 > Y_t (a downward jump off the barrier).
/// Values are multiples of 1/64 so the contact tests are exact up to
/// rounding in the affine representation.
inline GeneratedPath random_piecewise_path(std::uint64_t seed, std::uint64_t index, bool premature) {
  const CounterRng rng(seed, index, Stream::Synthetic);
  std::uint64_t ctr = 0;
  auto u = [&] { return rng.uniform(ctr++); };
  auto grid_value = [&](double lo, double hi) {
    const double steps = std::floor((hi - lo) * 64.0);
    return lo + std::floor(u() * (steps + 1.0)) / 64.0;
  };

  const int K = u() < 0.5 ? 4 : 8;
  const double H = 4.0;
  std::vector<double> t(K + 1);
  for (int k = 0; k <= K; ++k) t[k] = H * k / K;

  std::vector<double> b(K + 1);
  for (auto& v : b) v = grid_value(-0.5, 0.5);

  const auto kind = static_cast<CrossingKind>(std::min(4, static_cast<int>(u() * 5.0)));
  // Crossing segment c (for jump kinds: the jump is at t[c + 1]).
  const int first = premature ? 1 : 0;
  const int c = first + static_cast<int>(u() * (K - 1 - first));
  const int contact = premature ? static_cast<int>(u() * c) + 1 : -1;  // breakpoint index in [1, c]

  // Y at the start (right value) and end (left limit) of every segment.
  std::vector<double> y_start(K), y_end(K);
  for (int k = 0; k < K; ++k) {
    y_start[k] = grid_value(-2.0, -0.25);
    y_end[k] = grid_value(-2.0, -0.25);
  }
  // Continuity at some breakpoints before the crossing.
  for (int k = 1; k < K; ++k)
    if (u() < 0.5) y_start[k] = y_end[k - 1];

  const bool crosses = kind != CrossingKind::None;
  if (crosses) {
    switch (kind) {
      case CrossingKind::Creep: y_end[c] = grid_value(0.25, 1.0); break;
      case CrossingKind::ContactThenJump:
        y_end[c] = 0.0;
        if (c + 1 < K) y_start[c + 1] = grid_value(0.25, 1.0);
        break;
      case CrossingKind::ExactJump:
        if (c + 1 < K) y_start[c + 1] = 0.0;
        break;
      case CrossingKind::OvershootJump:
        if (c + 1 < K) y_start[c + 1] = grid_value(0.25, 1.0);
        break;
      case CrossingKind::None: break;
    }
    for (int k = c + 2; k < K; ++k) {
      y_start[k] = grid_value(-2.0, 1.0);
      y_end[k] = grid_value(-2.0, 1.0);
    }
    if (c + 1 < K && kind == CrossingKind::Creep) y_start[c + 1] = y_end[c];
    if (c + 1 < K && kind != CrossingKind::Creep) y_end[c + 1] = grid_value(-2.0, 1.0);
  }
  if (contact > 0) {
    y_end[contact - 1] = 0.0;
    y_start[contact] = grid_value(-2.0, -0.25);
  }

  std::vector<Segment> segs;
  std::vector<Jump> jumps;
  for (int k = 0; k < K; ++k) {
    const double x0 = y_start[k] + b[k], x1 = y_end[k] + b[k + 1];
    const double slope = (x1 - x0) / (t[k + 1] - t[k]);
    segs.push_back(Segment{t[k], t[k + 1], AffineFn{x0 - slope * t[k], slope}});
    if (k > 0) {
      if (y_end[k - 1] != y_start[k]) jumps.push_back(Jump{t[k], y_end[k - 1] + b[k], x0});
    }
  }
  GeneratedPath g{PiecewisePath(std::move(segs), std::move(jumps), H), Barrier::tabulated(t, b), kind,
                  std::nullopt};
  if (contact > 0) g.planted_contact = t[contact];
  return g;
}

}  // namespace fptlab
