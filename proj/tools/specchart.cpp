// specchart run <session.toml> [--seed N] [--trials N] [--json PATH] [--summary PATH]
//                [--continue-on-error] [--parallel] [--timing]
//
// Exit codes: 0 all tasks passed, 1 usage or session parse error,
// 2 a task failed or raised an error, 3 only undecided outcomes.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "specchart/session.hpp"

namespace ss = specchart::session;

int main(int argc, char** argv) {
  CLI::App app{"Exact spectral-chart computations from session files"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the tasks of a session file");
  std::string path, json_path, summary_path;
  ss::Options opt;
  run->add_option("session", path, "Session file (TOML)")->required();
  run->add_option("--seed", opt.seed, "Seed for randomized tasks");
  run->add_option("--trials", opt.trials, "Random candidates tried by isomorphism searches")->check(CLI::PositiveNumber);
  run->add_option("--json", json_path, "Write the JSON report here ('-' for stdout)");
  run->add_option("--summary", summary_path, "Write the plain-text summary here");
  run->add_flag("--continue-on-error", opt.continue_on_error, "Keep going after a task raises an error");
  run->add_flag("--parallel", opt.parallel, "Run tasks concurrently; report order is unchanged");
  run->add_flag("--timing", opt.timing, "Include per-task wall time in the reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  ss::Session session;
  try {
    session = ss::load_session(path);
  } catch (const specchart::ParseError& e) {
    std::cerr << path << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 1;
  }

  auto res = ss::run_session(session, opt);
  std::string report = res.report.dump(2) + "\n";
  if (json_path == "-") {
    std::cout << report;
  } else {
    if (!json_path.empty()) {
      std::ofstream out(json_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << json_path << "\n";
        return 1;
      }
      out << report;
    }
    std::cout << res.summary;
  }
  if (!summary_path.empty()) {
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << summary_path << "\n";
      return 1;
    }
    out << res.summary;
  }
  return res.exit_code;
}
