#pragma once

// The acceptance-criteria suite: twelve self-contained checks, each pinning
// one verified property of the library at a stated tolerance (formula
// identities, completeness/soundness bounds, repetition budgets, size
// scaling, tree construction and labeling, classical baselines and the
// fooling attack, probability inequalities).  The `dqma verify-all`
// subcommand and the acceptance_criteria test binary both run exactly this
// list; each criterion reports pass/fail plus a one-line measurement detail.

#include <string>
#include <vector>

#include "dqma/exec.hpp"

namespace dqma {

struct CriterionResult {
  int id = 0;                // 1..12
  std::string name;          // stable kebab-case identifier
  bool pass = false;
  std::string detail;        // measured values / margins
  double seconds = 0.0;      // wall time, filled by run_all_criteria
};

CriterionResult c01_swap_formula(exec::Mode mode);
CriterionResult c02_closeness_bound(exec::Mode mode);
CriterionResult c03_path_completeness(exec::Mode mode);
CriterionResult c04_path_soundness(exec::Mode mode);
CriterionResult c05_repetition_budget(exec::Mode mode);
CriterionResult c06_size_scaling(exec::Mode mode);
CriterionResult c07_tree_construction(exec::Mode mode);
CriterionResult c08_label_scheme(exec::Mode mode);
CriterionResult c09_tree_protocol(exec::Mode mode);
CriterionResult c10_classical_eq1(exec::Mode mode);
CriterionResult c11_fooling_attack(exec::Mode mode);
CriterionResult c12_event_bounds(exec::Mode mode);

// All twelve in order, with wall-clock seconds filled in.
std::vector<CriterionResult> run_all_criteria(exec::Mode mode = exec::Mode::parallel);

// "[PASS] c03 path-perfect-completeness — ..." (or [FAIL]).
std::string format_criterion_line(const CriterionResult& result);

}  // namespace dqma
