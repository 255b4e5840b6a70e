// fptlab command-line front end.
//
//   fptlab <command> [--config FILE] [--set section.key=value ...]
//          [--workers N] [--report FILE] [--sep CHAR]
//
// Commands: classify PATHFILE, simulate, closed-form, volterra, verify, table.
// Exit codes: 0 ok, 1 usage / parse / constraint, 2 numerical, 3 acceptance
// failure. Errors print one line "error kind=<kind> exit=<code> msg=<text>".

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "fptlab/acceptance.hpp"

namespace {

using namespace fptlab;

struct Common {
  std::string config_path = std::string(FPTLAB_DATA_DIR) + "/default.ini";
  std::vector<std::string> overrides;
  std::string report_path;
  std::string sep = ",";
  unsigned workers = default_workers();
};

class Table {
 public:
  Table(std::string sep, std::vector<std::string> header) : sep_(std::move(sep)) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) std::cout << (i ? sep_ : "") << cells[i];
    std::cout << '\n';
  }

 private:
  std::string sep_;
};

void write_report(const Common& c, const Report& r) {
  if (c.report_path.empty()) return;
  std::ofstream f(c.report_path);
  if (!f) throw Error(ErrorKind::Parse, "cannot write report '" + c.report_path + "'");
  f << r.str();
}

Report base_report(const std::string& command, const RunConfig& cfg) {
  Report r;
  r.add("report", "fptlab " + command);
  r.add_config(cfg);
  return r;
}

int cmd_classify(const Common& c, const std::string& path_file) {
  const auto cfg = load_config(c.config_path, c.overrides);
  std::ifstream f(path_file);
  if (!f) throw Error(ErrorKind::Parse, "cannot open path file '" + path_file + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  const auto pf = parse_path_file(ss.str());
  const auto rec = first_passage(pf.path, pf.barrier);
  const auto ann = announcing_sequence(pf.path, pf.barrier, 32);
  const auto pc = check_no_premature_contact(pf.path, pf.barrier);
  const auto rt = restricted_times(rec);

  Report r = base_report("classify", cfg);
  r.add("path_file", path_file);
  r.add("tau", rec.tau);
  r.add("y_minus", rec.y_minus);
  r.add("y_at", rec.y_at);
  r.add("mode", std::string(to_string(rec.mode)));
  r.add("tau_L", rt.tau_L);
  r.add("tau_G", rt.tau_G);
  r.add("no_premature_contact", pc.holds);
  r.add("premature_witness", pc.witness ? fmt_num(*pc.witness) : std::string("none"));
  r.add("announcing.sigma_limit", ann.sigma_limit);
  r.add("announcing.converged", ann.converged);
  std::string sig;
  for (std::size_t i = 0; i < std::min<std::size_t>(ann.sigma.size(), 8); ++i) sig += (i ? " " : "") + fmt_num(ann.sigma[i]);
  r.add("announcing.sigma_1_to_8", sig);
  for (const auto& [k, v] : r.lines())
    if (k.rfind("config.", 0) != 0) std::cout << k << "=" << v << '\n';
  write_report(c, r);
  return 0;
}

int cmd_simulate(const Common& c) {
  const auto cfg = load_config(c.config_path, c.overrides);
  const auto batch = simulate_batch(cfg.model, cfg.sim, detail::with_rates(cfg.q_list, {}), c.workers);
  const auto modes = estimate_mode_probs(batch);
  Report r = base_report("simulate", cfg);
  Table t(c.sep, {"quantity", "q", "mean", "se", "n"});
  auto put = [&](const std::string& name, double q, const McEstimate& e) {
    t.row({name, fmt_num(q), fmt_num(e.mean), fmt_num(e.std_error), std::to_string(e.n)});
    const std::string key = name + ".q" + fmt_num(q);
    r.add(key + ".mean", e.mean);
    r.add(key + ".se", e.std_error);
  };
  put("P_C0", 0.0, modes.c0);
  put("P_Jplus", 0.0, modes.jplus);
  for (double q : batch.qs) {
    put("G_indicator", q, estimate_gq_indicator(batch, q));
    put("G_compensator", q, estimate_gq_compensator(batch, q));
  }
  const auto counts = batch.counts();
  r.add("counts.c0", counts.c0);
  r.add("counts.jplus", counts.jplus);
  r.add("counts.censored", counts.censored);
  r.add("censored_fraction", modes.censored_fraction);
  std::cout << "# censored_fraction=" << fmt_num(modes.censored_fraction) << '\n';
  write_report(c, r);
  return 0;
}

int cmd_closed_form(const Common& c) {
  const auto cfg = load_config(c.config_path, c.overrides);
  const OvershootClosedForm cf(cfg.model);
  Report r = base_report("closed-form", cfg);
  Table t(c.sep, {"x", "G_0", "P_C0", "boundary_slope"});
  for (double x : cfg.x_list) {
    const double g = cf.value(x);
    t.row({fmt_num(x), fmt_num(g), fmt_num(1.0 - g), fmt_num(cf.slope())});
    r.add("x" + fmt_num(x) + ".G_0", g);
    r.add("x" + fmt_num(x) + ".P_C0", 1.0 - g);
  }
  r.add("boundary_slope", cf.slope());
  write_report(c, r);
  return 0;
}

int cmd_volterra(const Common& c) {
  const auto cfg = load_config(c.config_path, c.overrides);
  Report r = base_report("volterra", cfg);
  Table t(c.sep, {"x", "q", "G_q", "iterations", "sup_delta", "contraction_ratio", "truncation_error", "x_min",
                  "nodes"});
  for (double q : cfg.q_list) {
    VolterraOptions opt = cfg.volterra;
    opt.estimate_truncation = true;
    const auto sol = solve_wq(cfg.model, q, opt);
    for (double x : cfg.x_list) {
      const double g = gq_from_solution(sol, x);
      t.row({fmt_num(x), fmt_num(q), fmt_num(g), std::to_string(sol.iterations), fmt_num(sol.sup_delta),
             fmt_num(sol.contraction_ratio), fmt_num(sol.truncation_error), fmt_num(sol.x_min),
             std::to_string(sol.grid.size())});
      r.add("q" + fmt_num(q) + ".x" + fmt_num(x) + ".G_q", g);
    }
    const std::string pre = "q" + fmt_num(q) + ".";
    r.add(pre + "iterations", sol.iterations);
    r.add(pre + "sup_delta", sol.sup_delta);
    r.add(pre + "contraction_ratio", sol.contraction_ratio);
    r.add(pre + "truncation_error", sol.truncation_error);
    r.add(pre + "x_min", sol.x_min);
  }
  write_report(c, r);
  return 0;
}

int cmd_table(const Common& c) {
  const auto cfg = load_config(c.config_path, c.overrides);
  Report r = base_report("table", cfg);
  const auto rates = detail::with_rates(cfg.q_list, {});
  std::map<double, VolterraSolution> sols;
  for (double q : rates)
    if (q > 0.0) sols.emplace(q, solve_wq(cfg.model, q, cfg.volterra));
  const OvershootClosedForm cf(cfg.model);
  Table t(c.sep, {"x", "q", "G_q_analytic", "G_q_mc_indicator", "se_indicator", "G_q_mc_compensator",
                  "se_compensator", "z_indicator", "z_compensator"});
  for (double x : cfg.x_list) {
    const ModelParams p = cfg.model.with_start(x);
    SimConfig sim_b = cfg.sim;
    sim_b.seed = cfg.sim.seed + 1;
    const auto a = simulate_batch(p, cfg.sim, rates, c.workers);
    const auto b = simulate_batch(p, sim_b, rates, c.workers);
    for (double q : rates) {
      const double g = q == 0.0 ? cf.value(x) : gq_from_solution(sols.at(q), x);
      const auto ind = estimate_gq_indicator(a, q);
      const auto comp = estimate_gq_compensator(b, q);
      const double zi = z_score(g, 0.0, ind.mean, ind.std_error);
      const double zc = z_score(g, 0.0, comp.mean, comp.std_error);
      t.row({fmt_num(x), fmt_num(q), fmt_num(g), fmt_num(ind.mean), fmt_num(ind.std_error), fmt_num(comp.mean),
             fmt_num(comp.std_error), fmt_num(zi), fmt_num(zc)});
      const std::string pre = "x" + fmt_num(x) + ".q" + fmt_num(q) + ".";
      r.add(pre + "analytic", g);
      r.add(pre + "indicator.mean", ind.mean);
      r.add(pre + "indicator.se", ind.std_error);
      r.add(pre + "compensator.mean", comp.mean);
      r.add(pre + "compensator.se", comp.std_error);
      r.add(pre + "z.indicator", zi);
      r.add(pre + "z.compensator", zc);
    }
  }
  write_report(c, r);
  return 0;
}

int cmd_verify(const Common& c, bool skip_determinism) {
  const auto cfg = load_config(c.config_path, c.overrides);
  auto print = [](const CriterionResult& r) { std::cout << format_criterion(r) << std::endl; };
  auto first = run_acceptance(cfg, c.workers, print);
  write_report(c, first.report);
  bool ok = first.all_passed();
  if (!skip_determinism) {
    const unsigned other = c.workers == 1 ? 2 : 1;
    const auto t0 = std::chrono::steady_clock::now();
    const auto second = run_acceptance(cfg, other);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto det = determinism_criterion(first.report.str(), second.report.str(), c.workers, other, secs);
    print(det);
    ok = ok && det.passed;
  }
  std::cout << (ok ? "verify: all criteria passed" : "verify: FAILED") << std::endl;
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage mode classification, simulation and closed-form checks"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "INI configuration file");
    sub->add_option("--set", common.overrides, "override, section.key=value (repeatable)");
    sub->add_option("--workers", common.workers, "worker threads (default: FPT_WORKERS or hardware)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--report", common.report_path, "write a key=value report to this file");
    sub->add_option("--sep", common.sep, "table column separator");
  };

  std::string path_file;
  bool skip_determinism = false;
  auto* classify = app.add_subcommand("classify", "classify the first passage of a path file");
  classify->add_option("path", path_file, "path file")->required();
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo mode probabilities and G_q estimators");
  auto* closed = app.add_subcommand("closed-form", "G_0, P(C0) and the boundary slope over x_list");
  auto* volterra = app.add_subcommand("volterra", "G_q over x_list x q_list with convergence diagnostics");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_flag("--skip-determinism", skip_determinism, "skip the second run with another worker count");
  auto* table = app.add_subcommand("table", "analytic vs Monte Carlo comparison table");
  for (auto* s : {classify, simulate, closed, volterra, verify, table}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*classify) return cmd_classify(common, path_file);
    if (*simulate) return cmd_simulate(common);
    if (*closed) return cmd_closed_form(common);
    if (*volterra) return cmd_volterra(common);
    if (*verify) return cmd_verify(common, skip_determinism);
    if (*table) return cmd_table(common);
  } catch (const Error& e) {
    const int rc = exit_code(e.kind());
    std::cerr << "error kind=" << to_string(e.kind()) << " exit=" << rc << " msg=" << e.what() << std::endl;
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error kind=internal exit=2 msg=" << e.what() << std::endl;
    return 2;
  }
  return 1;
}
