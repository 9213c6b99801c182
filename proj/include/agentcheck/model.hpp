// Explicit-state concurrent game structures with observational knowledge
// and optional probabilistic outcomes.
//
// Every state assigns each agent a local token; two states are
// indistinguishable for an agent iff its tokens coincide. Transitions are
// keyed by joint action (one action per agent) and carry a distribution
// over successors. Models are immutable once built.

#ifndef AGENTCHECK_MODEL_HPP
#define AGENTCHECK_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "agentcheck/formula.hpp"
#include "agentcheck/graph.hpp"
#include "agentcheck/rewrite.hpp"
#include "agentcheck/state_set.hpp"

namespace agentcheck {

using AgentId = std::uint32_t;
using AtomId = std::uint32_t;
using ActionId = std::uint16_t;
using TokenId = std::uint32_t;

struct Successor {
  StateId target;
  double probability;
};

class ModelError : public std::runtime_error {
 public:
  enum class Kind {
    Parse,
    Reference,
    Domain,
    Seriality,
    ProductClosure,
    Distribution,
    Observability,
    Strategy,
    Deadlock,
  };

  ModelError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Feature {
  std::string name;
  std::int64_t max;  // domain is [0, max]
};

class ModelBuilder;

class Model {
 public:
  std::size_t num_states() const { return state_names_.size(); }
  std::size_t num_agents() const { return agents_.size(); }
  std::size_t num_atoms() const { return atoms_.size(); }
  std::size_t num_transitions() const { return trans_begin_.empty() ? 0 : trans_begin_.back(); }

  const std::vector<std::string>& agents() const { return agents_; }
  std::optional<AgentId> find_agent(std::string_view name) const;

  const std::vector<std::string>& atoms() const { return atoms_; }
  std::optional<AtomId> find_atom(std::string_view name) const;
  const StateSet& atom_states(AtomId atom) const { return labels_[atom]; }
  bool holds(AtomId atom, StateId s) const { return labels_[atom].contains(s); }

  const std::vector<Feature>& features() const { return features_; }
  std::optional<std::size_t> find_feature(std::string_view name) const;
  std::int64_t feature_value(StateId s, std::size_t feature) const {
    return feature_values_[s * features_.size() + feature];
  }

  const std::string& state_name(StateId s) const { return state_names_[s]; }
  std::optional<StateId> find_state(std::string_view name) const;
  const std::vector<StateId>& initial() const { return initial_; }

  TokenId local(StateId s, AgentId a) const { return local_[s * agents_.size() + a]; }
  const std::string& token_name(AgentId a, TokenId t) const { return tokens_[a][t]; }
  std::size_t num_tokens(AgentId a) const { return tokens_[a].size(); }
  std::optional<TokenId> find_token(AgentId a, std::string_view name) const;

  const std::vector<std::string>& actions(AgentId a) const { return actions_[a]; }
  std::optional<ActionId> find_action(AgentId a, std::string_view name) const;

  /// Transition indices of state s are [first, second).
  std::pair<std::size_t, std::size_t> transitions(StateId s) const {
    return {trans_begin_[s], trans_begin_[s + 1]};
  }
  std::span<const ActionId> joint(std::size_t t) const {
    return {joint_.data() + t * agents_.size(), agents_.size()};
  }
  std::span<const Successor> successors(std::size_t t) const {
    return {succ_.data() + succ_begin_[t], succ_.data() + succ_begin_[t + 1]};
  }

  /// Every positive-probability successor under any joint action.
  const Graph& graph() const { return graph_; }

  const std::vector<AtomId>& observable(AgentId a) const { return observable_[a]; }

  /// State of the model this one was derived from (identity for loaded
  /// models; the underlying state for monitor-augmented ones).
  StateId origin(StateId s) const { return origin_.empty() ? s : origin_[s]; }

  /// True when some transition has more than one successor.
  bool probabilistic() const;

  /// Feature name -> declared maximum, for quantifier expansion.
  FeatureDomains domains() const;

 private:
  friend class ModelBuilder;

  std::vector<std::string> agents_, atoms_, state_names_;
  std::vector<Feature> features_;
  std::vector<StateId> initial_;
  std::vector<StateSet> labels_;
  std::vector<std::int64_t> feature_values_;
  std::vector<TokenId> local_;
  std::vector<std::vector<std::string>> tokens_, actions_;
  std::vector<std::vector<AtomId>> observable_;
  std::vector<std::uint32_t> trans_begin_;
  std::vector<ActionId> joint_;
  std::vector<std::uint32_t> succ_begin_;
  std::vector<Successor> succ_;
  std::vector<StateId> origin_;
  Graph graph_;
  std::unordered_map<std::string, StateId> state_index_;
};

/// Incremental construction; build() validates every model invariant and
/// throws ModelError naming the offending state.
class ModelBuilder {
 public:
  explicit ModelBuilder(std::vector<std::string> agents);

  AtomId add_atom(const std::string& name);
  void add_feature(const std::string& name, std::int64_t max);
  void set_observable(std::string_view agent, const std::vector<std::string>& atoms);

  /// `local` lists one token per agent, in agent order.
  StateId add_state(const std::string& name, const std::vector<std::string>& local);
  void label(StateId s, std::string_view atom);
  void label(StateId s, AtomId atom);
  void set_feature(StateId s, std::string_view feature, std::int64_t value);
  void add_initial(StateId s);
  void set_origin(StateId s, StateId origin);

  /// `joint` lists one action per agent, in agent order. Successors with
  /// zero probability are dropped; the rest are normalised in build().
  void add_transition(StateId from, const std::vector<std::string>& joint,
                      std::vector<Successor> to);

  /// Starts a model with the same agents, atoms, features, observability,
  /// tokens and actions as `m` (ids preserved) but no states.
  static ModelBuilder like(const Model& m);

  TokenId declare_token(AgentId a, const std::string& token);
  ActionId declare_action(AgentId a, const std::string& action);
  StateId add_state(const std::string& name, std::vector<TokenId> local);
  void add_transition(StateId from, std::vector<ActionId> joint, std::vector<Successor> to);

  std::size_t num_states() const { return state_names_.size(); }

  Model build() &&;

 private:
  struct PendingTransition {
    StateId from;
    std::vector<ActionId> joint;
    std::vector<Successor> to;
  };

  AgentId agent_index(std::string_view name) const;
  std::optional<StateId> find_state(std::string_view name) const;

  Model m_;
  std::vector<std::string> state_names_;
  std::vector<std::vector<TokenId>> local_;
  std::vector<std::vector<std::optional<std::int64_t>>> feature_values_;
  std::vector<std::pair<StateId, AtomId>> labels_;
  std::vector<std::unordered_map<std::string, TokenId>> token_index_;
  std::vector<std::unordered_map<std::string, ActionId>> action_index_;
  std::unordered_map<std::string, AtomId> atom_index_;
  std::vector<PendingTransition> pending_;
  std::vector<StateId> origin_;
};

/// Loads the JSON model format; throws ModelError.
Model load_model(std::string_view json_text);
/// Serialises to the JSON model format (point transitions use the
/// `"to": "s"` shorthand).
std::string to_json(const Model& m);

StateSet reachable(const Model& m);

/// Components over all states of the model, sinks first.
std::vector<Component> scc_decomposition(const Model& m);

/// Product with sticky monitor bits, one per operand: bit b holds iff
/// operand b held somewhere on the history so far (current state
/// included). Adds atoms `__once_b`; local tokens are unchanged, so the
/// bits are not observable. Only reachable combinations are built. At most
/// 64 operands.
Model augment_monitors(const Model& m, std::span<const Formula> operands);

/// Evaluates a boolean state predicate at every state.
StateSet predicate_states(const Model& m, const Formula& predicate);

struct Strategy {
  std::string id;
  std::string agent;
  std::map<std::string, std::string> choice;  // local token -> action
};

/// Strategy table JSON: {"strategies": [{"id", "agent", "choice"}]}.
std::vector<Strategy> load_strategies(std::string_view json_text);
std::string strategies_to_json(const std::vector<Strategy>& table);

/// Removes transitions where the strategy's agent deviates from its choice.
/// States whose token the strategy does not mention keep all transitions
/// if they are unreachable; a reachable one is an error. Throws ModelError
/// (Deadlock) if some state loses every transition.
Model apply_strategy(const Model& m, const Strategy& s);

}  // namespace agentcheck

#endif  // AGENTCHECK_MODEL_HPP
