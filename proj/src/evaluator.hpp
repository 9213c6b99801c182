#ifndef AGENTCHECK_SRC_EVALUATOR_HPP
#define AGENTCHECK_SRC_EVALUATOR_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "agentcheck/formula.hpp"
#include "agentcheck/model.hpp"
#include "agentcheck/strategic.hpp"
#include "agentcheck/verdict.hpp"

namespace agentcheck::detail {

// Lower: known to hold. Upper: not known to fail. Equal unless a bounded
// enumeration gave up.
struct Sat {
  StateSet lower, upper;
};

class Evaluator {
 public:
  Evaluator(const Model& m, const CheckOptions& options);

  const Model& model() const { return m_; }
  const StateSet& reachable() const { return reach_; }

  Sat eval(const Formula& f);

  // Side results of the outermost operator, for reporting.
  std::optional<double> top_value;
  std::string top_strategy;

 private:
  Sat eval_node(const Formula& f);
  Sat eval_path(const node::PathQuantifier& q);
  Sat eval_coalition(const Formula& f, const node::Coalition& c);
  Sat eval_knows(const node::Knows& k);
  Sat eval_suppose(const node::Suppose& s);

  const Model& m_;
  const CheckOptions& options_;
  StateSet reach_;
  const void* top_ = nullptr;
  std::unordered_map<const void*, Sat> memo_;
  std::map<std::string, std::shared_ptr<const Model>> pruned_;
};

// Evaluates `f` and packages the verdict; `f` may contain every construct
// except ONCE, macros and quantifiers.
Verdict evaluate_top(const Formula& f, const Model& m, const CheckOptions& options);

}  // namespace agentcheck::detail

#endif  // AGENTCHECK_SRC_EVALUATOR_HPP
