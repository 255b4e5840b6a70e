#pragma once

// Simulation of the affine jump-diffusion with upward Exp(eta) jumps and of
// pure compound-Poisson step paths.
//
// The affine path is split as X = D + J: D is the jump-free OU process
// driven by W, sampled exactly on the monitoring grid (and by exact OU
// bridges at jump epochs); J_t = sum_i e^{beta (t - T_i)} U_i is the
// deterministic response to the jumps. The jump clock is exact, so J+ vs C0
// attribution carries no time-discretisation error. Continuous crossings
// between monitoring points are detected by the Brownian-bridge test with
// sigma frozen over the interval.

#include <span>
#include <variant>
#include <vector>

#include "fptlab/model.hpp"
#include "fptlab/pathlab.hpp"
#include "fptlab/rng.hpp"

namespace fptlab {

/// Exact transition of dX = (alpha + beta X) dt + sigma dW over dt:
/// X' = decay * X + shift + sd * Z.
struct OuTransition {
  double decay = 1.0;
  double shift = 0.0;
  double sd = 0.0;

  static OuTransition over(double dt, double alpha, double beta, double sigma) {
    OuTransition tr;
    if (beta == 0.0) {
      tr.shift = alpha * dt;
      tr.sd = sigma * std::sqrt(dt);
    } else {
      const double em1 = std::expm1(beta * dt);
      tr.decay = 1.0 + em1;
      tr.shift = alpha * em1 / beta;
      tr.sd = sigma * std::sqrt(std::expm1(2.0 * beta * dt) / (2.0 * beta));
    }
    return tr;
  }

  double mean(double level) const { return decay * level + shift; }
  double apply(double level, double gaussian) const { return mean(level) + sd * gaussian; }
};

inline double ou_exact_step(double level, double dt, double gaussian, const ModelParams& p) {
  require(dt > 0.0, ErrorKind::Domain, "ou_exact_step: dt must be > 0");
  return OuTransition::over(dt, p.alpha, p.beta, p.sigma).apply(level, gaussian);
}

/// Probability that a Brownian bridge with volatility sigma from y0 < 0 to
/// y1 < 0 over dt touches 0.
inline double bridge_crossing_prob(double y0, double y1, double dt, double sigma) {
  require(y0 < 0.0 && y1 < 0.0, ErrorKind::Domain, "bridge_crossing_prob: endpoints must be below 0");
  require(dt > 0.0, ErrorKind::Domain, "bridge_crossing_prob: dt must be > 0");
  return std::exp(-2.0 * y0 * y1 / (sigma * sigma * dt));
}

/// Exact OU bridge: sample X_u given X_s = x_s and X_t = x_t, s < u < t.
inline double ou_bridge_point(double s, double x_s, double t, double x_t, double u, double gaussian,
                              const ModelParams& p) {
  const auto first = OuTransition::over(u - s, p.alpha, p.beta, p.sigma);
  const auto second = OuTransition::over(t - u, p.alpha, p.beta, p.sigma);
  const double v1 = first.sd * first.sd;
  const double v2 = second.sd * second.sd;
  const double phi = second.decay;
  const double denom = v2 + phi * phi * v1;
  const double mean = (first.mean(x_s) * v2 + phi * v1 * (x_t - second.shift)) / denom;
  return mean + std::sqrt(v1 * v2 / denom) * gaussian;
}

enum class SimMode { C0, JPlus, Censored };

inline std::string_view to_string(SimMode m) {
  switch (m) {
    case SimMode::C0: return "C0";
    case SimMode::JPlus: return "J+";
    case SimMode::Censored: return "Censored";
  }
  return "?";
}

struct CrossingOutcome {
  SimMode mode = SimMode::Censored;
  double tau = kNever;  // kNever when censored
  double overshoot = 0.0;
  double pre_jump_level = std::numeric_limits<double>::quiet_NaN();
  /// int_0^{tau ^ T} e^{-q s} lambda e^{-eta (a - X_{s-})} ds, one entry per
  /// requested discount rate.
  std::vector<double> compensator_integrals;
  double compensator_integral = 0.0;  // entry for the first rate
};

namespace detail {

/// Number of bridge-test counters reserved per monitoring step.
inline constexpr std::uint64_t kCrossSlots = 64;

class CompensatorAccumulator {
 public:
  CompensatorAccumulator(const ModelParams& p, std::span<const double> qs)
      : eta_(p.eta), scale_(p.lambda * std::exp(-p.eta * p.a)), qs_(qs.begin(), qs.end()),
        sums_(qs.size(), 0.0), disc_s_(qs.size(), 1.0), disc_e_(qs.size(), 1.0) {}

  double rate(double level) const { return scale_ * std::exp(eta_ * level); }

  /// e^{-q t} for every rate at an arbitrary time t.
  void discounts_at(double t, std::vector<double>& out) const {
    out.resize(qs_.size());
    for (std::size_t i = 0; i < qs_.size(); ++i) out[i] = std::exp(-qs_[i] * t);
  }

  /// Trapezoid from the current point (rate_s) to e (rate_e, pre-jump),
  /// with the discount factors at e supplied; e becomes the current point.
  void advance(double s, double e, double rate_s, double rate_e, const std::vector<double>& disc_e) {
    const double half = 0.5 * (e - s);
    for (std::size_t i = 0; i < qs_.size(); ++i) {
      sums_[i] += half * (disc_s_[i] * rate_s + disc_e[i] * rate_e);
      disc_s_[i] = disc_e[i];
    }
  }

  void advance(double s, double e, double rate_s, double rate_e) {
    discounts_at(e, disc_e_);
    advance(s, e, rate_s, rate_e, disc_e_);
  }

  std::size_t size() const { return qs_.size(); }
  double q(std::size_t i) const { return qs_[i]; }
  const std::vector<double>& sums() const { return sums_; }

 private:
  double eta_;
  double scale_;
  std::vector<double> qs_;
  std::vector<double> sums_;
  std::vector<double> disc_s_;
  std::vector<double> disc_e_;
};

}  // namespace detail

/// One path of the affine model; `path_index` selects its random streams.
inline CrossingOutcome simulate_crossing(const ModelParams& p, const SimConfig& cfg, std::span<const double> qs,
                                         std::uint64_t path_index = 0) {
  const CounterRng diffusion(cfg.seed, path_index, Stream::Diffusion);
  const CounterRng jumps(cfg.seed, path_index, Stream::Jumps);
  const CounterRng bridge_pt(cfg.seed, path_index, Stream::BridgePoint);
  const CounterRng bridge_x(cfg.seed, path_index, Stream::BridgeCross);

  const double a = p.a;
  const double inv_var = 1.0 / (p.sigma * p.sigma);
  const double h = cfg.step;
  const auto steps = static_cast<std::uint64_t>(std::ceil(cfg.horizon / h - 1e-9));
  const auto full = OuTransition::over(h, p.alpha, p.beta, p.sigma);

  detail::CompensatorAccumulator comp(p, qs);
  CrossingOutcome out;
  // Discount factors on the monitoring grid by recurrence, e^{-q (k+1) h}.
  std::vector<double> grid_disc(qs.size(), 1.0), step_disc(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) step_disc[i] = std::exp(-qs[i] * h);

  std::uint64_t jump_index = 0;
  auto next_jump = [&](double from) {
    const auto [ue, uu] = jumps.uniform_pair(jump_index);
    return std::pair{from - std::log(ue) / p.lambda, -std::log(uu) / p.eta};
  };
  auto [t_jump, u_jump] = next_jump(0.0);

  double d = p.x;     // jump-free OU part at the current point
  double jpart = 0.0; // jump response at the current point (post-jump)
  double s = 0.0;     // current point in time
  double x_s = p.x;
  double rate_s = comp.rate(x_s);
  std::pair<double, double> z_pair{};

  auto finish = [&](SimMode mode, double tau) {
    out.mode = mode;
    out.tau = tau;
    out.compensator_integrals = comp.sums();
    out.compensator_integral = out.compensator_integrals.empty() ? 0.0 : out.compensator_integrals.front();
    return out;
  };

  // Continuous crossing test on [s, e] from x_s to x_e; returns tau or kNever.
  auto crossing_in = [&](double e, double x_e, std::uint64_t k, std::uint64_t slot) {
    if (x_e >= a) return s + (e - s) * (a - x_s) / (x_e - x_s);
    if (cfg.bridge_correction) {
      const double expo = 2.0 * (a - x_s) * (a - x_e) * inv_var / (e - s);
      if (expo < 745.0) {
        const double u = bridge_x.uniform(k * detail::kCrossSlots + std::min(slot, detail::kCrossSlots - 1));
        if (u < std::exp(-expo)) return s + 0.5 * (e - s);
      }
    }
    return kNever;
  };

  for (std::uint64_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * h;
    const double t1 = (k + 1 == steps) ? cfg.horizon : static_cast<double>(k + 1) * h;
    if (k % 2 == 0) z_pair = diffusion.normal_pair(k / 2);
    const double z = (k % 2 == 0) ? z_pair.first : z_pair.second;
    const auto tr = (k + 1 < steps) ? full : OuTransition::over(t1 - t0, p.alpha, p.beta, p.sigma);
    const double d_end = tr.apply(d, z);  // jump-free part is driven by D only
    std::uint64_t slot = 0;

    while (t_jump <= t1) {
      const double u = t_jump;
      const double d_u = (u < t1) ? ou_bridge_point(s, d, t1, d_end, u, bridge_pt.normal(jump_index), p) : d_end;
      const double j_u = jpart * std::exp(p.beta * (u - s));
      const double x_u_minus = d_u + j_u;
      const double rate_u = comp.rate(x_u_minus);
      const double tau_c = crossing_in(u, x_u_minus, k, slot++);
      if (!is_never(tau_c)) {
        comp.advance(s, tau_c, rate_s, comp.rate(a));
        return finish(SimMode::C0, tau_c);
      }
      comp.advance(s, u, rate_s, rate_u);
      const double x_after = x_u_minus + u_jump;
      if (x_after >= a) {
        out.overshoot = x_after - a;
        out.pre_jump_level = x_u_minus;
        return finish(SimMode::JPlus, u);
      }
      d = d_u;
      jpart = j_u + u_jump;
      s = u;
      x_s = x_after;
      rate_s = comp.rate(x_s);
      ++jump_index;
      std::tie(t_jump, u_jump) = next_jump(u);
    }

    const double j_end = jpart * std::exp(p.beta * (t1 - s));
    const double x_end = d_end + j_end;
    const double rate_end = comp.rate(x_end);
    const double tau_c = crossing_in(t1, x_end, k, slot);
    if (!is_never(tau_c)) {
      comp.advance(s, tau_c, rate_s, comp.rate(a));
      return finish(SimMode::C0, tau_c);
    }
    for (std::size_t i = 0; i < grid_disc.size(); ++i) grid_disc[i] *= step_disc[i];
    if (k + 1 == steps) comp.discounts_at(t1, grid_disc);
    comp.advance(s, t1, rate_s, rate_end, grid_disc);
    d = d_end;
    jpart = j_end;
    s = t1;
    x_s = x_end;
    rate_s = rate_end;
  }
  return finish(SimMode::Censored, kNever);
}

inline CrossingOutcome simulate_crossing(const ModelParams& p, const SimConfig& cfg, double q,
                                         std::uint64_t path_index = 0) {
  const double qs[1] = {q};
  return simulate_crossing(p, cfg, std::span<const double>(qs, 1), path_index);
}

// ---------------------------------------------------------------------------
// Compound Poisson step paths

struct DegenerateJumps {
  double value = 1.0;
};
struct LatticeJumps {
  std::vector<double> values;
  std::vector<double> probs;
};
struct ExponentialJumps {
  double rate = 1.0;
};
struct UniformJumps {
  double lo = 0.0;
  double hi = 1.0;
};
using JumpLaw = std::variant<DegenerateJumps, LatticeJumps, ExponentialJumps, UniformJumps>;

struct CompoundPoissonSpec {
  double intensity = 1.0;
  JumpLaw jump_law = DegenerateJumps{};
  double barrier_level = 1.0;
  double start = 0.0;

  void validate() const {
    auto bad = [](const char* m) { throw Error(ErrorKind::Domain, std::string("compound poisson: ") + m); };
    if (!(intensity > 0.0)) bad("intensity must be > 0");
    if (const auto* l = std::get_if<LatticeJumps>(&jump_law)) {
      if (l->values.empty() || l->values.size() != l->probs.size()) bad("lattice values/probs mismatch");
      double total = 0.0;
      for (double pr : l->probs) {
        if (pr < 0.0) bad("negative lattice probability");
        total += pr;
      }
      if (std::abs(total - 1.0) > 1e-12) bad("lattice probabilities must sum to 1");
    }
    if (const auto* e = std::get_if<ExponentialJumps>(&jump_law); e && !(e->rate > 0.0)) bad("exponential rate must be > 0");
    if (const auto* u = std::get_if<UniformJumps>(&jump_law); u && !(u->hi > u->lo)) bad("uniform law needs hi > lo");
  }
};

/// Inverse-CDF draw from the jump law.
inline double draw_jump(const JumpLaw& law, double u) {
  struct Visitor {
    double u;
    double operator()(const DegenerateJumps& d) const { return d.value; }
    double operator()(const LatticeJumps& l) const {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < l.values.size(); ++i) {
        acc += l.probs[i];
        if (u < acc) return l.values[i];
      }
      return l.values.back();
    }
    double operator()(const ExponentialJumps& e) const { return -std::log(u) / e.rate; }
    double operator()(const UniformJumps& r) const { return r.lo + (r.hi - r.lo) * u; }
  };
  return std::visit(Visitor{u}, law);
}

/// F([c, inf)) = P(U >= c); atoms at c are included within `eps`.
inline double jump_survival(const JumpLaw& law, double c, double eps = 1e-12) {
  struct Visitor {
    double c;
    double eps;
    double operator()(const DegenerateJumps& d) const { return d.value >= c - eps ? 1.0 : 0.0; }
    double operator()(const LatticeJumps& l) const {
      double s = 0.0;
      for (std::size_t i = 0; i < l.values.size(); ++i)
        if (l.values[i] >= c - eps) s += l.probs[i];
      return s;
    }
    double operator()(const ExponentialJumps& e) const { return c <= 0.0 ? 1.0 : std::exp(-e.rate * c); }
    double operator()(const UniformJumps& r) const {
      if (c <= r.lo) return 1.0;
      if (c >= r.hi) return 0.0;
      return (r.hi - c) / (r.hi - r.lo);
    }
  };
  return std::visit(Visitor{c, eps}, law);
}

/// F({c}) = P(U = c) within `eps`; zero for diffuse laws.
inline double jump_atom(const JumpLaw& law, double c, double eps = 1e-12) {
  if (const auto* d = std::get_if<DegenerateJumps>(&law)) return std::abs(d->value - c) <= eps ? 1.0 : 0.0;
  if (const auto* l = std::get_if<LatticeJumps>(&law)) {
    double s = 0.0;
    for (std::size_t i = 0; i < l->values.size(); ++i)
      if (std::abs(l->values[i] - c) <= eps) s += l->probs[i];
    return s;
  }
  return 0.0;
}

struct CompoundPoissonPath {
  PiecewisePath path;
  CrossingRecord record;
};

/// Exact step path X_t = start + sum_{k <= N_t} U_k on [0, horizon],
/// classified against the constant barrier.
inline CompoundPoissonPath simulate_compound_poisson(const CompoundPoissonSpec& spec, std::uint64_t seed,
                                                     double horizon, std::uint64_t path_index = 0) {
  spec.validate();
  require(horizon > 0.0, ErrorKind::Domain, "compound poisson: horizon must be > 0");
  const CounterRng rng(seed, path_index, Stream::CompoundPoisson);
  std::vector<Segment> segs;
  std::vector<Jump> jumps;
  double level = spec.start;
  double t = 0.0;
  for (std::uint64_t i = 0;; ++i) {
    const auto [ue, uj] = rng.uniform_pair(i);
    double next = t - std::log(ue) / spec.intensity;
    if (!(next > t)) next = std::nextafter(t, kNever);
    if (next >= horizon) break;
    const double size = draw_jump(spec.jump_law, uj);
    segs.push_back(Segment{t, next, AffineFn{level, 0.0}});
    jumps.push_back(Jump{next, level, level + size});
    level += size;
    t = next;
  }
  segs.push_back(Segment{t, horizon, AffineFn{level, 0.0}});
  PiecewisePath path(std::move(segs), std::move(jumps), horizon);
  auto rec = first_passage(path, Barrier::constant(spec.barrier_level));
  return CompoundPoissonPath{std::move(path), rec};
}

}  // namespace fptlab
