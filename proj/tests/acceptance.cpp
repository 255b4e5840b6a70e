// Acceptance gate: one PASS/FAIL line per criterion, exit 3 if any fails.
//
//   acceptance [--config FILE] [--set section.key=value ...] [--report FILE]
//              [--workers N] [--skip-determinism]

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "fptlab/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fptlab acceptance suite"};
  std::string config_path = std::string(FPTLAB_DATA_DIR) + "/default.ini";
  std::vector<std::string> overrides;
  std::string report_path;
  unsigned workers = 2;
  bool skip_determinism = false;
  app.add_option("--config", config_path, "INI configuration");
  app.add_option("--set", overrides, "section.key=value override");
  app.add_option("--report", report_path, "write the report of the first run here");
  app.add_option("--workers", workers, "worker threads for the first run (the second uses a different count)")->check(CLI::PositiveNumber);
  app.add_flag("--skip-determinism", skip_determinism, "skip the second run");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = fptlab::load_config(config_path, overrides);
    auto print = [](const fptlab::CriterionResult& c) { std::cout << fptlab::format_criterion(c) << std::endl; };
    const auto t0 = std::chrono::steady_clock::now();
    auto first = fptlab::run_acceptance(cfg, workers, print);
    const double first_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = first.all_passed();
    if (!report_path.empty()) std::ofstream(report_path) << first.report.str();

    if (!skip_determinism) {
      const auto t1 = std::chrono::steady_clock::now();
      const unsigned other = workers == 1 ? 2 : 1;
      const auto second = fptlab::run_acceptance(cfg, other);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
      const auto det = fptlab::determinism_criterion(first.report.str(), second.report.str(), workers, other, secs);
      print(det);
      ok = ok && det.passed;
    }
    std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILED") << " (first run "
              << first_seconds << " s)" << std::endl;
    return ok ? 0 : 3;
  } catch (const fptlab::Error& e) {
    const int rc = fptlab::exit_code(e.kind());
    std::cerr << "error kind=" << fptlab::to_string(e.kind()) << " exit=" << rc << " msg=" << e.what() << std::endl;
    return rc;
  }
}
