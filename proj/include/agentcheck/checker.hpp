// Formula evaluation over explicit models.
//
// Satisfaction is computed over the reachable states. K[a] f holds at a
// state when f holds at every reachable state sharing a's local token.
// Where bounded strategy enumeration gives up, the evaluator keeps a lower
// set (known to hold) and an upper set (not known to fail); a verdict is
// Unknown when the initial states fall between the two.

#ifndef AGENTCHECK_CHECKER_HPP
#define AGENTCHECK_CHECKER_HPP

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "agentcheck/formula.hpp"
#include "agentcheck/model.hpp"
#include "agentcheck/parser.hpp"
#include "agentcheck/verdict.hpp"

namespace agentcheck {

/// Temporal and epistemic fragment only: constants, atoms, comparisons,
/// connectives, A/E with every path body, and K. ONCE must already be
/// compiled to monitor atoms. Coalition and supp nodes throw CheckError
/// naming the strategic entry points.
Verdict eval(const Formula& f, const Model& m);

/// Full dispatch: every construct except ONCE, macros and quantifiers
/// (see check_formula for those).
Verdict evaluate(const Formula& f, const Model& m, const CheckOptions& options = {});

/// Names a formula refers to that the model (or strategy table) lacks,
/// as "atom x", "agent y", "feature z" or "strategy s".
std::vector<std::string> missing_names(const Formula& f, const Model& m,
                                       const std::vector<Strategy>& strategies = {});

/// Prepared formulas sharing one monitor-augmented model.
struct PreparedSpec {
  std::shared_ptr<const Model> model;  // augmented when any ONCE occurs
  std::vector<Formula> operands;       // ONCE operands, in monitor order
};

/// Macro and quantifier expansion against the model's feature domains.
Formula expand(const Formula& f, const Model& m);

/// Augments `m` with one monitor per distinct ONCE operand across
/// `formulas` (already expanded).
PreparedSpec prepare(const std::vector<Formula>& formulas, const Model& m);

/// Expand, bind, augment and evaluate a single formula.
Verdict check_formula(const Formula& f, const Model& m, const CheckOptions& options = {});

struct InformalMarker {};

using RequirementResult = std::variant<Verdict, InformalMarker>;

/// Informal requirements yield InformalMarker; unbound names throw
/// BindingError.
RequirementResult check_requirement(const Requirement& r, const Model& m,
                                    const CheckOptions& options = {});

}  // namespace agentcheck

#endif  // AGENTCHECK_CHECKER_HPP
