// Acceptance gate: every release-blocking criterion runs here, one test case
// per criterion, each printing a single PASS/FAIL line with its measured
// margin.  The same checks are reachable from the CLI via `verify-all`.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdio>

#include "dqma/acceptance.hpp"

using namespace dqma;

namespace {

void run(CriterionResult (*criterion)(exec::Mode)) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult result = criterion(exec::Mode::parallel);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::puts(format_criterion_line(result).c_str());
  std::fflush(stdout);
  INFO(result.detail);
  CHECK(result.pass);
}

}  // namespace

TEST_CASE("SWAP test statistics match the overlap formula") { run(c01_swap_formula); }
TEST_CASE("SWAP acceptance bounds the state distance") { run(c02_closeness_bound); }
TEST_CASE("honest path provers are accepted with certainty") { run(c03_path_completeness); }
TEST_CASE("per-test rejection budget holds on unequal inputs") { run(c04_path_soundness); }
TEST_CASE("repetition drives cheating acceptance below one third") { run(c05_repetition_budget); }
TEST_CASE("certificate sizes follow the frozen scaling table") { run(c06_size_scaling); }
TEST_CASE("certification trees satisfy their structural invariants") { run(c07_tree_construction); }
TEST_CASE("structure labels reject every inequivalent corruption") { run(c08_label_scheme); }
TEST_CASE("tree protocol meets its desk-checked star values") { run(c09_tree_protocol); }
TEST_CASE("one-bit classical protocol achieves its exact gap") { run(c10_classical_eq1); }
TEST_CASE("fooling attack certifies the classical width bound") { run(c11_fooling_attack); }
TEST_CASE("joint event bounds hold on random distributions") { run(c12_event_bounds); }
