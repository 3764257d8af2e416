// Runs the acceptance criteria and prints one PASS/FAIL line per criterion,
// followed by the individual checks. Exits nonzero if any criterion fails.

#include <CLI11.hpp>

#include <cstdio>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  int only = 0;
  bool extended = false, terse = false;
  app.add_option("--only", only, "single criterion")->check(CLI::Range(1, selfsim::acceptance::kCriteria));
  app.add_flag("--extended", extended, "second parameter point for the PDE criteria");
  app.add_flag("--terse", terse, "verdict lines only");
  CLI11_PARSE(app, argc, argv);

  selfsim::acceptance::Suite suite(extended);
  int failed = 0;
  for (int id = 1; id <= selfsim::acceptance::kCriteria; ++id) {
    if (only && id != only) continue;
    const auto r = suite.run(id);
    if (!r.pass()) ++failed;
    std::fputs(selfsim::acceptance::format(r, !terse).c_str(), stdout);
    std::fflush(stdout);
  }
  if (!only) std::printf("%d of %d criteria failed\n", failed, selfsim::acceptance::kCriteria);
  return failed ? 1 : 0;
}
