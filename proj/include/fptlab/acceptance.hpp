#pragma once

// The acceptance suite: eleven pass/fail criteria over every module at the
// configured reference setting. Criteria 1-10 produce a deterministic
// key=value report; criterion 11 compares two such reports produced with
// different worker counts.

#include <chrono>
#include <functional>
#include <map>
#include <numbers>

#include "fptlab/analytic.hpp"
#include "fptlab/config.hpp"
#include "fptlab/corpus.hpp"
#include "fptlab/mc.hpp"

namespace fptlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;  // wall time; never written to the report
};

struct AcceptanceRun {
  std::vector<CriterionResult> criteria;
  Report report;

  bool all_passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
  }
};

/// Process exit status for a library error: 2 for numerical failures, 1 for
/// parse errors and constraint violations.
inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Accuracy:
    case ErrorKind::Resonance:
    case ErrorKind::Convergence:
    case ErrorKind::UnderSample: return 2;
    default: return 1;
  }
}

/// One line per criterion: "[PASS] 3 three-way G_0 agreement: ... (1.2 s)".
inline std::string format_criterion(const CriterionResult& c) {
  char t[32];
  std::snprintf(t, sizeof t, "%.2f", c.seconds);
  return std::string(c.passed ? "[PASS] " : "[FAIL] ") + std::to_string(c.id) + " " + c.name + ": " + c.detail +
         " (" + t + " s)";
}

namespace detail {

class CriterionScope {
 public:
  CriterionScope(AcceptanceRun& run, int id, std::string name, const std::function<void(const CriterionResult&)>& cb)
      : run_(run), cb_(cb), start_(std::chrono::steady_clock::now()) {
    res_.id = id;
    res_.name = std::move(name);
  }

  std::string key(const std::string& k) const { return "c" + std::to_string(res_.id) + "." + k; }
  void add(const std::string& k, double v) { run_.report.add(key(k), v); }
  void add(const std::string& k, std::uint64_t v) { run_.report.add(key(k), v); }
  void add(const std::string& k, const std::string& v) { run_.report.add(key(k), v); }
  void add(const std::string& k, bool v) { run_.report.add(key(k), v); }

  void finish(bool passed, std::string detail) {
    res_.passed = passed;
    res_.detail = std::move(detail);
    res_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    run_.report.add(key("passed"), passed);
    run_.criteria.push_back(res_);
    if (cb_) cb_(res_);
  }

  /// Runs body; any library error fails the criterion with its cause.
  template <class Body>
  void run(Body body) {
    try {
      body(*this);
    } catch (const Error& e) {
      add("error", std::string(to_string(e.kind())) + ": " + e.what());
      finish(false, std::string("error (") + std::string(to_string(e.kind())) + "): " + e.what());
    }
  }

 private:
  AcceptanceRun& run_;
  const std::function<void(const CriterionResult&)>& cb_;
  std::chrono::steady_clock::time_point start_;
  CriterionResult res_;
};

inline std::string kv(const std::string& k, double v) { return k + "=" + fmt_num(v); }

inline std::vector<double> with_rates(std::vector<double> qs, std::initializer_list<double> extra) {
  qs.insert(qs.begin(), 0.0);
  qs.insert(qs.end(), extra);
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  return qs;
}

}  // namespace detail

/// Criteria 1-10. `workers` only affects scheduling, never the report.
inline AcceptanceRun run_acceptance(const RunConfig& cfg, unsigned workers,
                                    const std::function<void(const CriterionResult&)>& on_result = {}) {
  using detail::CriterionScope;
  using detail::kv;
  AcceptanceRun run;
  run.report.add("report", "fptlab acceptance");
  run.report.add_config(cfg);
  const auto& p = cfg.model;
  const double x0 = p.x;
  const std::uint64_t seed = cfg.sim.seed;

  // 1. Special-function oracle.
  CriterionScope(run, 1, "special-function oracle", on_result).run([&](CriterionScope& c) {
    double worst = 0.0;
    for (double z : {-5.0, -2.0, 0.0, 1.0, 3.0, 5.0}) {
      const double exact = std::exp(0.25 * z * z) * std::sqrt(std::numbers::pi / 2.0) * std::erfc(z / std::numbers::sqrt2);
      worst = std::max(worst, std::abs(pcf_d(-1.0, z) / exact - 1.0));
    }
    const CounterRng rng(seed, 0, Stream::Synthetic);
    double worst_id = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto [u1, u2] = rng.uniform_pair(1000 + i);
      const double nu = -5.0 + 3.9 * u1, z = -5.0 + 10.0 * u2;
      const double h = 1e-3 * std::max(1.0, std::abs(z));
      const double fd = (-pcf_d(nu, z + 2 * h) + 8 * pcf_d(nu, z + h) - 8 * pcf_d(nu, z - h) + pcf_d(nu, z - 2 * h)) /
                        (12 * h);
      const auto pr = pcf_d_pair(nu, z);
      const double ident = 0.5 * z * pr.d_nu - pr.d_nu_plus_1;
      const double scale = std::abs(0.5 * z * pr.d_nu) + std::abs(pr.d_nu_plus_1);
      worst_id = std::max(worst_id, std::abs(fd - ident) / scale);
    }
    c.add("erfc_max_rel_error", worst);
    c.add("derivative_identity_max_rel_error", worst_id);
    c.finish(worst <= 1e-8 && worst_id <= 1e-6,
             kv("max_rel_err(nu=-1)", worst) + " (<=1e-8), " + kv("max_rel_identity", worst_id) + " (<=1e-6)");
  });

  // 2. Weber residual and boundary condition.
  CriterionScope(run, 2, "Weber residual", on_result).run([&](CriterionScope& c) {
    double worst_res = 0.0, worst_bc = 0.0;
    for (double q : {0.0, 0.05, 0.5}) {
      const HomogeneousBasis basis(p, q, cfg.volterra.resonance_threshold);
      auto psi = [&](double y) { return basis.psi(y); };
      auto chi = [&](double y) { return basis.chi(y); };
      for (int k = 0; k < 50; ++k) {
        const double x = p.a - 3.0 + 3.0 * k / 50.0;
        const double h = 1e-3;
        worst_res = std::max({worst_res, weber_residual(basis, psi, x, h).relative(),
                              weber_residual(basis, chi, x, h).relative()});
      }
      const double b_chi = basis.boundary_operator(basis.chi(p.a), basis.chi_prime(p.a));
      worst_bc = std::max(worst_bc, std::abs(b_chi) / std::abs(basis.boundary_psi()));
    }
    c.add("max_rel_residual", worst_res);
    c.add("max_boundary_ratio", worst_bc);
    c.finish(worst_res <= 1e-6 && worst_bc <= 1e-8,
             kv("max_rel_residual", worst_res) + " (<=1e-6), " + kv("|B_a chi|/|B_a psi|", worst_bc) + " (<=1e-8)");
  });

  // Shared Monte Carlo batches: A for indicator statistics, B (independent
  // seed) for the compensator estimator.
  const auto rates = detail::with_rates(cfg.q_list, {0.01, 0.05});
  SimConfig sim_b = cfg.sim;
  sim_b.seed = seed + 1;
  std::optional<SampleBatch> batch_a, batch_b;
  auto batches = [&] {
    if (!batch_a) batch_a = simulate_batch(p, cfg.sim, rates, workers);
    if (!batch_b) batch_b = simulate_batch(p, sim_b, rates, workers);
  };

  // 3. Three-way G_0 agreement.
  double g0_x0 = std::numeric_limits<double>::quiet_NaN();
  CriterionScope(run, 3, "three-way G_0 agreement", on_result).run([&](CriterionScope& c) {
    g0_x0 = g0(p, x0);
    batches();
    const auto ind = estimate_gq_indicator(*batch_a, 0.0);
    const auto comp = estimate_gq_compensator(*batch_b, 0.0);
    const double z1 = z_score(g0_x0, 0.0, ind.mean, ind.std_error);
    const double z2 = z_score(g0_x0, 0.0, comp.mean, comp.std_error);
    const double z3 = z_score(ind.mean, ind.std_error, comp.mean, comp.std_error);
    const double cens = std::max(batch_a->censored_fraction(), batch_b->censored_fraction());
    c.add("g0", g0_x0);
    c.add("indicator.mean", ind.mean);
    c.add("indicator.se", ind.std_error);
    c.add("compensator.mean", comp.mean);
    c.add("compensator.se", comp.std_error);
    c.add("se_ratio", comp.std_error / ind.std_error);
    c.add("z.analytic_indicator", z1);
    c.add("z.analytic_compensator", z2);
    c.add("z.indicator_compensator", z3);
    c.add("censored_fraction", cens);
    c.finish(z1 <= 3 && z2 <= 3 && z3 <= 3 && cens < 1e-3,
             kv("g0", g0_x0) + ", " + kv("indicator", ind.mean) + "+-" + fmt_num(ind.std_error) + ", " +
                 kv("compensator", comp.mean) + "+-" + fmt_num(comp.std_error) + ", " +
                 kv("max|z|", std::max({z1, z2, z3})) + " (<=3), " + kv("censored", cens) + " (<1e-3)");
  });

  // 4. Collapse at q = 0.
  std::map<double, VolterraSolution> solutions;
  auto solution = [&](double q) -> const VolterraSolution& {
    auto it = solutions.find(q);
    if (it == solutions.end()) {
      VolterraOptions opt = cfg.volterra;
      opt.estimate_truncation = q > 0.0;
      it = solutions.emplace(q, solve_wq(p, q, opt)).first;
    }
    return it->second;
  };
  CriterionScope(run, 4, "q = 0 collapse", on_result).run([&](CriterionScope& c) {
    const auto& sol = solution(0.0);
    const auto closed = OvershootClosedForm(p).values(sol.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) worst = std::max(worst, std::abs(sol.g(sol.grid[i]) - closed[i]));
    c.add("nodes", static_cast<std::uint64_t>(sol.grid.size()));
    c.add("iterations", static_cast<std::uint64_t>(sol.iterations));
    c.add("max_abs_diff", worst);
    c.finish(worst <= 1e-8,
             kv("max|G_volterra - G_0|", worst) + " (<=1e-8) over " + std::to_string(sol.grid.size()) +
                 " nodes, iterations=" + std::to_string(sol.iterations));
  });

  // 5. Discounted agreement and residuals.
  CriterionScope(run, 5, "discounted agreement", on_result).run([&](CriterionScope& c) {
    batches();
    bool ok = true;
    double max_z = 0.0, max_res = 0.0, max_compat = 0.0;
    for (double q : cfg.q_list) {
      const auto& sol = solution(q);
      const double gq = gq_from_solution(sol, x0);
      const auto ind = estimate_gq_indicator(*batch_a, q);
      const auto comp = estimate_gq_compensator(*batch_b, q);
      const double zi = z_score(gq, 0.0, ind.mean, ind.std_error);
      const double zc = z_score(gq, 0.0, comp.mean, comp.std_error);
      auto g = [&](double y) { return sol.g(y); };
      double res = 0.0;
      const std::uint64_t np = cfg.acceptance.residual_points;
      const double lo = sol.x_min + 0.01;  // keeps the stencil on the grid
      for (std::uint64_t k = 0; k < np; ++k) {
        const double x = lo + (p.a - 0.01 - lo) * static_cast<double>(k) / static_cast<double>(np - 1);
        res = std::max(res, std::abs(oide_residual(p, q, g, x)));
      }
      const double compat = std::abs(compatibility_residual(p, g));
      const std::string pre = "q" + fmt_num(q) + ".";
      c.add(pre + "volterra", gq);
      c.add(pre + "iterations", static_cast<std::uint64_t>(sol.iterations));
      c.add(pre + "contraction_ratio", sol.contraction_ratio);
      c.add(pre + "truncation_error", sol.truncation_error);
      c.add(pre + "indicator.mean", ind.mean);
      c.add(pre + "indicator.se", ind.std_error);
      c.add(pre + "compensator.mean", comp.mean);
      c.add(pre + "compensator.se", comp.std_error);
      c.add(pre + "z.indicator", zi);
      c.add(pre + "z.compensator", zc);
      c.add(pre + "max_oide_residual", res);
      c.add(pre + "compatibility_residual", compat);
      max_z = std::max({max_z, zi, zc});
      max_res = std::max(max_res, res);
      max_compat = std::max(max_compat, compat);
      ok = ok && zi <= 3 && zc <= 3 && res <= 1e-4 * p.lambda && compat <= 1e-4 * p.lambda;
    }
    c.finish(ok, kv("max|z|", max_z) + " (<=3), " + kv("max|R_q|", max_res) + " (<=1e-4 lambda), " +
                     kv("max|compat|", max_compat) + " (<=1e-4 lambda)");
  });

  // 6. Overshoot law.
  CriterionScope(run, 6, "overshoot law", on_result).run([&](CriterionScope& c) {
    batches();
    const auto law = overshoot_law_test(*batch_a);
    const double bound = 3.0 / std::sqrt(static_cast<double>(law.n_jplus));
    c.add("n_jplus", static_cast<std::uint64_t>(law.n_jplus));
    c.add("ks_statistic", law.ks_statistic);
    c.add("p_value", law.p_value);
    c.add("independence_corr", law.independence_corr);
    c.finish(law.n_jplus >= 10000 && law.p_value > 0.01 && std::abs(law.independence_corr) <= bound,
             "n=" + std::to_string(law.n_jplus) + " (>=1e4), " + kv("KS p", law.p_value) + " (>0.01), " +
                 kv("|corr|", std::abs(law.independence_corr)) + " (<=" + fmt_num(bound) + ")");
  });

  // 7. Small-q expansion.
  CriterionScope(run, 7, "small-q expansion", on_result).run([&](CriterionScope& c) {
    batches();
    const auto mom = estimate_overshoot_moments(*batch_a);
    const double g0v = std::isnan(g0_x0) ? g0(p, x0) : g0_x0;
    bool ok = true;
    std::string detail;
    for (double q : {0.01, 0.05}) {
      const double mq = (g0v - gq_from_solution(solution(q), x0)) / q;
      const bool in = mq >= 0.0 && mq <= mom.m.mean + 3.0 * mom.m.std_error;
      ok = ok && in;
      c.add("m_q" + fmt_num(q), mq);
      detail += kv("m_" + fmt_num(q), mq) + ", ";
    }
    const double q = 0.05;
    const double rem = std::abs(gq_from_solution(solution(q), x0) - g0v + q * mom.m.mean);
    const double se = std::hypot(q * mom.m.std_error, 0.5 * q * q * mom.t2.std_error);
    const double bound = 0.5 * q * q * mom.t2.mean + 3.0 * se;
    ok = ok && rem <= bound;
    c.add("M.mean", mom.m.mean);
    c.add("M.se", mom.m.std_error);
    c.add("T2.mean", mom.t2.mean);
    c.add("T2.se", mom.t2.std_error);
    c.add("remainder", rem);
    c.add("remainder_bound", bound);
    c.finish(ok, detail + "bracket [0, " + fmt_num(mom.m.mean + 3.0 * mom.m.std_error) + "], " +
                     kv("|G_q-G_0+qM|", rem) + " (<=" + fmt_num(bound) + ")");
  });

  // 8. Boundary asymptotics.
  CriterionScope(run, 8, "boundary asymptotics", on_result).run([&](CriterionScope& c) {
    const OvershootClosedForm cf(p);
    const double slope = cf.slope();
    const double d2 = std::abs(cf.value(p.a - 1e-2) / 1e-2 / slope - 1.0);
    const double d3 = std::abs(cf.value(p.a - 1e-3) / 1e-3 / slope - 1.0);
    c.add("slope", slope);
    c.add("rel_dev_1e-2", d2);
    c.add("rel_dev_1e-3", d3);
    c.finish(d3 <= 1e-2 && d3 < d2, kv("slope", slope) + ", " + kv("rel_dev(1e-2)", d2) + ", " +
                                        kv("rel_dev(1e-3)", d3) + " (<=1e-2)");
  });

  // 9. Pathwise corpus.
  CriterionScope(run, 9, "pathwise corpus", on_result).run([&](CriterionScope& c) {
    const auto ex_lc = parse_path_file(std::string(kLeftContactThenJumpPath));
    const auto rec_lc = first_passage(ex_lc.path, ex_lc.barrier);
    const bool ok_lc = rec_lc.mode == Mode::CPlus;

    const auto ex_pc = parse_path_file(std::string(kPrematureContactPath));
    const auto pc_pc = check_no_premature_contact(ex_pc.path, ex_pc.barrier);
    const auto an_pc = announcing_sequence(ex_pc.path, ex_pc.barrier, 64);
    const bool sig_le_1 = std::all_of(an_pc.sigma.begin(), an_pc.sigma.end(), [](double s) { return s <= 1.0; });
    const bool ok_pc = !pc_pc.holds && pc_pc.witness && *pc_pc.witness == 1.0 && !an_pc.converged && sig_le_1 &&
                      an_pc.tau == 2.0;

    std::uint64_t compliant_ok = 0, violating_ok = 0;
    const std::uint64_t n = cfg.acceptance.random_paths;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto g = random_piecewise_path(seed + 2, i, false);
      const auto rep = announcing_sequence(g.path, g.barrier, 256);
      if (check_no_premature_contact(g.path, g.barrier).holds && rep.converged) ++compliant_ok;
      const auto v = random_piecewise_path(seed + 2, n + i, true);
      const auto pcv = check_no_premature_contact(v.path, v.barrier);
      const auto repv = announcing_sequence(v.path, v.barrier, 256);
      if (!pcv.holds && !repv.converged) ++violating_ok;
    }
    c.add("left_contact_path.mode", std::string(to_string(rec_lc.mode)));
    c.add("premature_path.no_premature_contact", pc_pc.holds);
    c.add("premature_path.witness", pc_pc.witness.value_or(kNever));
    c.add("premature_path.converged", an_pc.converged);
    c.add("random.compliant_converged", compliant_ok);
    c.add("random.violating_not_converged", violating_ok);
    c.finish(ok_lc && ok_pc && compliant_ok == n && violating_ok == n,
             std::string("C+ path -> ") + std::string(to_string(rec_lc.mode)) + ", premature-contact path witness=" +
                 (pc_pc.witness ? fmt_num(*pc_pc.witness) : "none") + " converged=" + (an_pc.converged ? "true" : "false") +
                 ", random compliant converged " + std::to_string(compliant_ok) + "/" + std::to_string(n) +
                 ", random violating non-converged " + std::to_string(violating_ok) + "/" + std::to_string(n));
  });

  // 10. Compound Poisson.
  CriterionScope(run, 10, "compound Poisson", on_result).run([&](CriterionScope& c) {
    const std::uint64_t n = cfg.acceptance.compound_paths;
    const double horizon = cfg.acceptance.compound_horizon;
    CompoundPoissonSpec lattice{1.0, LatticeJumps{{1.0, 2.0}, {0.5, 0.5}}, 1.0, 0.0};
    const auto lc = compound_poisson_modes(lattice, n, seed + 3, horizon, workers);
    const auto pj0 = frequency(lc.j0, n, lc);
    const double zl = z_score(pj0.mean, pj0.std_error, 0.5, 0.0);
    CompoundPoissonSpec expo{1.0, ExponentialJumps{1.0}, 1.0, 0.0};
    const auto ec = compound_poisson_modes(expo, n, seed + 4, horizon, workers);
    CompoundPoissonSpec mart{1.0, ExponentialJumps{1.0}, 2.0, 0.0};
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k) times.push_back(0.5 * k);
    const auto mc = compensator_martingale_check(mart, times, n, seed + 5, workers);
    c.add("lattice.p_j0", pj0.mean);
    c.add("lattice.se", pj0.std_error);
    c.add("lattice.z", zl);
    c.add("exponential.j0_count", ec.j0);
    c.add("martingale.max_abs_deviation", mc.max_abs_deviation);
    c.add("martingale.se_at_max", mc.se_at_max);
    c.add("martingale.max_z", mc.max_z);
    c.add("martingale.lambda_monotone", mc.lambda_monotone);
    c.finish(zl <= 3 && ec.j0 == 0 && mc.max_z <= 3 && mc.lambda_monotone,
             kv("P(J0) lattice", pj0.mean) + "+-" + fmt_num(pj0.std_error) + ", exponential J0 count=" +
                 std::to_string(ec.j0) + ", " + kv("martingale max|dev|/SE", mc.max_z) + " (<=3)");
  });

  return run;
}

/// Criterion 11 from two reports of the same configuration.
inline CriterionResult determinism_criterion(const std::string& first, const std::string& second, unsigned w1,
                                             unsigned w2, double seconds) {
  CriterionResult r;
  r.id = 11;
  r.name = "determinism";
  r.passed = first == second && !first.empty();
  std::size_t diff_line = 0;
  if (!r.passed) {
    std::istringstream a(first), b(second);
    std::string la, lb;
    for (std::size_t i = 1;; ++i) {
      const bool ga = static_cast<bool>(std::getline(a, la)), gb = static_cast<bool>(std::getline(b, lb));
      if (!ga && !gb) break;
      if (!ga || !gb || la != lb) {
        diff_line = i;
        break;
      }
    }
  }
  r.detail = "reports with workers=" + std::to_string(w1) + " and workers=" + std::to_string(w2) +
             (r.passed ? " are byte-identical (" + std::to_string(first.size()) + " bytes)"
                       : " differ at line " + std::to_string(diff_line));
  r.seconds = seconds;
  return r;
}

}  // namespace fptlab
