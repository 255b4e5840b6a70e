#pragma once

// Monte Carlo estimators over batches of simulated paths. Paths are
// simulated in parallel but every reduction runs over the outcomes in
// path-index order, so results never depend on the worker count.

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

#include "fptlab/ajd_sim.hpp"

namespace fptlab {

/// Worker count from FPT_WORKERS, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("FPT_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluate fn(i) for i in [0, n) on `workers` threads; results in index order.
template <class Fn>
auto parallel_map(std::uint64_t n, unsigned workers, Fn fn) -> std::vector<decltype(fn(std::uint64_t{}))> {
  using R = decltype(fn(std::uint64_t{}));
  std::vector<R> out(n);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(n, 1))));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Pairwise summation in index order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

struct ModeCounts {
  std::uint64_t c0 = 0;
  std::uint64_t j0 = 0;
  std::uint64_t jplus = 0;
  std::uint64_t censored = 0;
  std::uint64_t total() const { return c0 + j0 + jplus + censored; }
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  ModeCounts breakdown;
};

inline McEstimate sample_estimate(std::span<const double> xs, ModeCounts breakdown = {}) {
  McEstimate e;
  e.n = xs.size();
  e.breakdown = breakdown;
  if (xs.empty()) return e;
  e.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    std::vector<double> dev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - e.mean) * (xs[i] - e.mean);
    const double var = pairwise_sum(dev) / static_cast<double>(xs.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return e;
}

/// |m1 - m2| / sqrt(se1^2 + se2^2), zero when both are exact and equal.
inline double z_score(double m1, double se1, double m2, double se2) {
  const double se = std::hypot(se1, se2);
  if (se == 0.0) return m1 == m2 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(m1 - m2) / se;
}

// ---------------------------------------------------------------------------
// Affine-model batches

/// Outcomes of cfg.n_paths paths, all sharing one set of discount rates.
struct SampleBatch {
  ModelParams params;
  SimConfig config;
  std::vector<double> qs;
  std::vector<CrossingOutcome> outcomes;

  ModeCounts counts() const {
    ModeCounts c;
    for (const auto& o : outcomes) {
      switch (o.mode) {
        case SimMode::C0: ++c.c0; break;
        case SimMode::JPlus: ++c.jplus; break;
        case SimMode::Censored: ++c.censored; break;
      }
    }
    return c;
  }

  double censored_fraction() const {
    return outcomes.empty() ? 0.0 : static_cast<double>(counts().censored) / static_cast<double>(outcomes.size());
  }

  std::size_t q_index(double q) const {
    for (std::size_t i = 0; i < qs.size(); ++i)
      if (qs[i] == q) return i;
    throw Error(ErrorKind::Domain, "sample batch: discount rate " + std::to_string(q) + " was not simulated");
  }

  template <class Fn>
  McEstimate estimate(Fn per_path) const {
    std::vector<double> xs(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) xs[i] = per_path(outcomes[i]);
    return sample_estimate(xs, counts());
  }
};

inline SampleBatch simulate_batch(const ModelParams& params, const SimConfig& cfg, std::vector<double> qs,
                                  unsigned workers = default_workers()) {
  params.validate();
  cfg.validate();
  for (double q : qs) require(q >= 0.0, ErrorKind::Domain, "discount rates must be >= 0");
  if (std::find(qs.begin(), qs.end(), 0.0) == qs.end()) qs.insert(qs.begin(), 0.0);
  SampleBatch b{params, cfg, qs, {}};
  b.outcomes = parallel_map(cfg.n_paths, workers, [&](std::uint64_t i) {
    auto o = simulate_crossing(params, cfg, std::span<const double>(b.qs), i);
    return o;
  });
  return b;
}

struct ModeProbabilities {
  McEstimate c0;
  McEstimate jplus;
  double censored_fraction = 0.0;
};

inline ModeProbabilities estimate_mode_probs(const SampleBatch& b) {
  ModeProbabilities m;
  m.c0 = b.estimate([](const CrossingOutcome& o) { return o.mode == SimMode::C0 ? 1.0 : 0.0; });
  m.jplus = b.estimate([](const CrossingOutcome& o) { return o.mode == SimMode::JPlus ? 1.0 : 0.0; });
  m.censored_fraction = b.censored_fraction();
  return m;
}

inline ModeProbabilities estimate_mode_probs(const ModelParams& params, const SimConfig& cfg,
                                             unsigned workers = default_workers()) {
  return estimate_mode_probs(simulate_batch(params, cfg, {0.0}, workers));
}

/// Mean of e^{-q tau} 1{J+}.
inline McEstimate estimate_gq_indicator(const SampleBatch& b, double q) {
  return b.estimate([q](const CrossingOutcome& o) { return o.mode == SimMode::JPlus ? std::exp(-q * o.tau) : 0.0; });
}

/// Mean of int_0^tau e^{-q s} lambda e^{-eta (a - X_{s-})} ds.
inline McEstimate estimate_gq_compensator(const SampleBatch& b, double q) {
  const std::size_t i = b.q_index(q);
  return b.estimate([i](const CrossingOutcome& o) { return o.compensator_integrals[i]; });
}

inline McEstimate estimate_gq_indicator(const ModelParams& params, const SimConfig& cfg, double q,
                                        unsigned workers = default_workers()) {
  return estimate_gq_indicator(simulate_batch(params, cfg, {q}, workers), q);
}

inline McEstimate estimate_gq_compensator(const ModelParams& params, const SimConfig& cfg, double q,
                                          unsigned workers = default_workers()) {
  return estimate_gq_compensator(simulate_batch(params, cfg, {q}, workers), q);
}

struct HqFq {
  McEstimate h;
  McEstimate f;
};

/// H_q = E[e^{-q tau} 1{tau <= T}], F_q = H_q - G_q on the same paths.
inline HqFq estimate_hq_fq(const SampleBatch& b, double q) {
  HqFq r;
  r.h = b.estimate([q](const CrossingOutcome& o) { return o.mode == SimMode::Censored ? 0.0 : std::exp(-q * o.tau); });
  r.f = b.estimate([q](const CrossingOutcome& o) { return o.mode == SimMode::C0 ? std::exp(-q * o.tau) : 0.0; });
  return r;
}

struct OvershootMoments {
  McEstimate m;   // E[tau 1{J+}]
  McEstimate t2;  // E[tau^2 1{J+}]
};

inline OvershootMoments estimate_overshoot_moments(const SampleBatch& b) {
  return {b.estimate([](const CrossingOutcome& o) { return o.mode == SimMode::JPlus ? o.tau : 0.0; }),
          b.estimate([](const CrossingOutcome& o) { return o.mode == SimMode::JPlus ? o.tau * o.tau : 0.0; })};
}

// ---------------------------------------------------------------------------
// Overshoot law

/// Asymptotic Kolmogorov tail P(K > t) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 t^2}.
inline double kolmogorov_tail(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.2) return 1.0;  // the series is 1 to double precision here
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// One-sample KS statistic of `xs` against the Exp(rate) law.
inline KsResult ks_test_exponential(std::vector<double> xs, double rate) {
  require(xs.size() >= 100, ErrorKind::UnderSample, "ks test: need at least 100 samples");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = -std::expm1(-rate * std::max(xs[i], 0.0));
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_tail(std::sqrt(n) * d), xs.size()};
}

inline double sample_correlation(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

struct OvershootLaw {
  double ks_statistic = 0.0;
  double p_value = 1.0;
  double independence_corr = 0.0;
  std::size_t n_jplus = 0;
};

inline constexpr std::size_t kMinOvershootSamples = 1000;

/// KS test of J+ overshoots against Exp(eta) and their correlation with the
/// pre-jump level. Censored and C0 paths are excluded.
inline OvershootLaw overshoot_law_test(const SampleBatch& b) {
  std::vector<double> over, pre;
  for (const auto& o : b.outcomes) {
    if (o.mode != SimMode::JPlus) continue;
    over.push_back(o.overshoot);
    pre.push_back(o.pre_jump_level);
  }
  if (over.size() < kMinOvershootSamples)
    throw NumericalError(ErrorKind::UnderSample,
                         "overshoot test: only " + std::to_string(over.size()) + " J+ samples (need 1000)",
                         static_cast<double>(over.size()));
  OvershootLaw r;
  r.n_jplus = over.size();
  r.independence_corr = sample_correlation(over, pre);
  const auto ks = ks_test_exponential(std::move(over), b.params.eta);
  r.ks_statistic = ks.statistic;
  r.p_value = ks.p_value;
  return r;
}

inline OvershootLaw overshoot_law_test(const ModelParams& params, const SimConfig& cfg,
                                       unsigned workers = default_workers()) {
  return overshoot_law_test(simulate_batch(params, cfg, {0.0}, workers));
}

// ---------------------------------------------------------------------------
// Compound Poisson

/// Lambda_t = int_0^{t ^ tau} lambda F([a - X_{s-}, inf)) ds on an exact step
/// path, evaluated at each time in `times`.
inline std::vector<double> compound_poisson_compensator(const CompoundPoissonSpec& spec, const CompoundPoissonPath& cp,
                                                        std::span<const double> times) {
  std::vector<double> out(times.size(), 0.0);
  const double tau = cp.record.tau;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double stop = std::min(times[k], tau);
    double acc = 0.0;
    for (const auto& seg : cp.path.segments()) {
      if (seg.t_start >= stop) break;
      const double e = std::min(seg.t_end, stop);
      const double level = seg.value(seg.t_start);
      acc += spec.intensity * jump_survival(spec.jump_law, spec.barrier_level - level) * (e - seg.t_start);
    }
    out[k] = acc;
  }
  return out;
}

struct MartingaleCheck {
  std::vector<double> times;
  std::vector<double> mean_deviation;  // E[1{tau <= t} - Lambda_t] per time
  std::vector<double> std_error;
  double max_abs_deviation = 0.0;
  double se_at_max = 0.0;
  /// max over times of |deviation| / SE (0 where both vanish).
  double max_z = 0.0;
  bool lambda_monotone = true;
};

inline MartingaleCheck compensator_martingale_check(const CompoundPoissonSpec& spec, std::vector<double> times,
                                                    std::uint64_t n_paths, std::uint64_t seed,
                                                    unsigned workers = default_workers()) {
  spec.validate();
  require(!times.empty(), ErrorKind::Domain, "martingale check: empty time grid");
  std::sort(times.begin(), times.end());
  const double horizon = times.back();
  struct PathDev {
    std::vector<double> dev;
    bool monotone = true;
  };
  const auto per_path = parallel_map(n_paths, workers, [&](std::uint64_t i) {
    const auto cp = simulate_compound_poisson(spec, seed, horizon, i);
    const auto lam = compound_poisson_compensator(spec, cp, times);
    PathDev d;
    d.dev.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      d.dev[k] = (cp.record.tau <= times[k] ? 1.0 : 0.0) - lam[k];
      if (k > 0 && lam[k] < lam[k - 1]) d.monotone = false;
    }
    return d;
  });
  MartingaleCheck r;
  r.times = times;
  std::vector<double> col(n_paths);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::uint64_t i = 0; i < n_paths; ++i) col[i] = per_path[i].dev[k];
    const auto e = sample_estimate(col);
    r.mean_deviation.push_back(e.mean);
    r.std_error.push_back(e.std_error);
    if (std::abs(e.mean) > r.max_abs_deviation) {
      r.max_abs_deviation = std::abs(e.mean);
      r.se_at_max = e.std_error;
    }
    const double z = e.std_error > 0.0 ? std::abs(e.mean) / e.std_error : (e.mean == 0.0 ? 0.0 : kNever);
    r.max_z = std::max(r.max_z, z);
  }
  for (const auto& d : per_path) r.lambda_monotone = r.lambda_monotone && d.monotone;
  return r;
}

/// Mode frequencies of exact compound-Poisson paths.
inline ModeCounts compound_poisson_modes(const CompoundPoissonSpec& spec, std::uint64_t n_paths, std::uint64_t seed,
                                         double horizon, unsigned workers = default_workers()) {
  const auto modes = parallel_map(n_paths, workers, [&](std::uint64_t i) {
    return simulate_compound_poisson(spec, seed, horizon, i).record.mode;
  });
  ModeCounts c;
  for (Mode m : modes) {
    switch (m) {
      case Mode::C0: ++c.c0; break;
      case Mode::J0: ++c.j0; break;
      case Mode::JPlus: ++c.jplus; break;
      case Mode::NoCrossing: ++c.censored; break;
      case Mode::CPlus: throw Error(ErrorKind::Inconsistent, "compound poisson path classified C+");
    }
  }
  return c;
}

/// Frequency estimate with binomial standard error.
inline McEstimate frequency(std::uint64_t hits, std::uint64_t n, ModeCounts breakdown = {}) {
  McEstimate e;
  e.n = n;
  e.breakdown = breakdown;
  if (n == 0) return e;
  e.mean = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  return e;
}

}  // namespace fptlab
