// Coalition operators: perfect-information fixpoints, uniform strategy
// enumeration, complexity-bounded natural strategies, and supp.
//
// Opponents are adversarial and probabilistic outcomes are resolved
// against the coalition, so every positive-probability successor counts.

#ifndef AGENTCHECK_STRATEGIC_HPP
#define AGENTCHECK_STRATEGIC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agentcheck/formula.hpp"
#include "agentcheck/model.hpp"
#include "agentcheck/verdict.hpp"

namespace agentcheck {

/// Coalition membership, one flag per model agent.
using AgentMask = std::vector<bool>;

AgentMask make_agent_mask(const Model& m, const std::vector<std::string>& agents);

/// States where the coalition has a joint choice forcing every outcome
/// into `target`, whatever the other agents do.
StateSet controllable_pre(const Model& m, const AgentMask& c, const StateSet& target);

/// IR satisfaction set of <<c>> body over evaluated operands. FG and GF
/// bodies throw CheckError.
StateSet coalition_states(const Model& m, const AgentMask& c, PathBody::Kind kind,
                          std::uint32_t steps, const StateSet& hold, const StateSet& arg);

struct UniformResult {
  StateSet sat;
  bool complete = true;  // false when the strategy budget ran out
  std::size_t strategies_tried = 0;
  /// First (in enumeration order) strategy winning at every state of
  /// `focus`, as "agent:token=action" items.
  std::optional<std::string> witness;
};

/// ir satisfaction set: enumerate uniform memoryless joint strategies of the
/// coalition over the local tokens occurring in `domain`; a state satisfies
/// the formula iff some strategy wins there. Throws CheckError if a
/// coalition agent's enabled actions differ between two states of `domain`
/// sharing its local token.
UniformResult uniform_coalition_states(const Model& m, const AgentMask& c,
                                       PathBody::Kind kind, std::uint32_t steps,
                                       const StateSet& hold, const StateSet& arg,
                                       const StateSet& domain, const StateSet& focus,
                                       std::size_t budget);

struct Literal {
  std::string atom;
  bool positive = true;
  bool operator==(const Literal&) const = default;
};

struct NaturalRule {
  std::vector<Literal> guard;  // conjunction; empty means `true`
  std::string action;
  bool operator==(const NaturalRule&) const = default;
};

/// Ordered rule list; the first rule whose guard holds fires.
struct NaturalStrategy {
  std::string agent;
  std::vector<NaturalRule> rules;

  /// Literal occurrences over all guards, with `true` counting as one.
  std::uint32_t complexity() const;
  /// Rules as "[guard -> action, ...]".
  std::string to_string() const;
};

/// Throws CheckError unless the last guard is `true`, guards mention only
/// atoms observable to the agent, and the selected action is enabled in
/// every state of `domain` where its rule fires first.
void validate_natural_strategy(const Model& m, const NaturalStrategy& s,
                               const StateSet& domain);

/// States from which every outcome of following `s` satisfies the body.
StateSet natural_strategy_states(const Model& m, const NaturalStrategy& s,
                                 PathBody::Kind kind, std::uint32_t steps,
                                 const StateSet& hold, const StateSet& arg,
                                 const StateSet& domain);

struct NaturalResult {
  StateSet sat;
  bool complete = true;  // false when the candidate budget ran out
  std::size_t candidates = 0;
  std::size_t distinct = 0;  // strategies with distinct induced choices
  std::optional<NaturalStrategy> witness;  // wins at every state of `focus`
};

/// States where some natural strategy of complexity <= limit (guards of at
/// most `literals` literals, at most `rules` rules) wins. Candidates are
/// deduplicated by the choice they induce on `domain`.
NaturalResult natural_coalition_states(const Model& m, AgentId agent, std::uint32_t limit,
                                       std::uint32_t literals, std::uint32_t rules,
                                       PathBody::Kind kind, std::uint32_t steps,
                                       const StateSet& hold, const StateSet& arg,
                                       const StateSet& domain, const StateSet& focus,
                                       std::size_t budget);

/// Coalition formula without bound (state operands may be arbitrary).
Verdict atl_eval(const Formula& f, const Model& m, const CheckOptions& options = {});

/// Coalition formula with a complexity bound.
Verdict atl_eval_natural(const Formula& f, const Model& m, const CheckOptions& options = {});

/// Checks whether a given natural strategy witnesses `<<agent>> body` at
/// the initial states.
Verdict verify_natural(const Formula& f, const Model& m, const NaturalStrategy& s,
                       const CheckOptions& options = {});

/// supp(a: s) f, with `s` looked up in options.strategies.
Verdict suppose_eval(const Formula& f, const Model& m, const CheckOptions& options);

}  // namespace agentcheck

#endif  // AGENTCHECK_STRATEGIC_HPP
