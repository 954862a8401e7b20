// Acceptance harness: one PASS/FAIL line per criterion on the default
// desk-scale configuration. Exit status 5 when any criterion fails.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include "bbm/app.hpp"

int main(int argc, char** argv) {
  bbm::RunConfig cfg = bbm::preset_config("default");
  if (argc > 1) cfg = bbm::load_config(argv[1]);
  bbm::AcceptanceSuite suite(cfg, bbm::Parallel{1}, &std::cout);
  int failed = 0;
  double total = 0.0;
  for (int id = 1; id <= bbm::kCriteriaCount; ++id) {
    const bbm::CriterionResult r = suite.run(id);
    total += r.seconds;
    failed += !r.pass;
    std::printf("%s C%d %s (%.1fs): %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed in %.1fs\n", bbm::kCriteriaCount - failed, bbm::kCriteriaCount, total);
  return failed ? 5 : 0;
}
