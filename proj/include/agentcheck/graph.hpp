// Successor graphs and the fixpoint algorithms over them.
//
// All path-quantifier algorithms treat every edge as a possible step:
// nondeterminism, agent choices and positive-probability outcomes alike.
// Graphs must be serial (every vertex has a successor).

#ifndef AGENTCHECK_GRAPH_HPP
#define AGENTCHECK_GRAPH_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "agentcheck/formula.hpp"
#include "agentcheck/state_set.hpp"

namespace agentcheck {

class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list; duplicate edges are merged.
  Graph(std::size_t vertices, std::vector<std::pair<StateId, StateId>> edges);

  std::size_t size() const { return succ_begin_.empty() ? 0 : succ_begin_.size() - 1; }
  std::size_t num_edges() const { return succ_.size(); }

  std::span<const StateId> successors(StateId s) const {
    return {succ_.data() + succ_begin_[s], succ_.data() + succ_begin_[s + 1]};
  }
  std::span<const StateId> predecessors(StateId s) const {
    return {pred_.data() + pred_begin_[s], pred_.data() + pred_begin_[s + 1]};
  }

 private:
  std::vector<std::uint32_t> succ_begin_, pred_begin_;
  std::vector<StateId> succ_, pred_;
};

struct Component {
  std::vector<StateId> states;  // increasing order
  bool cyclic = false;          // contains an edge inside itself
};

/// Tarjan decomposition, emitted in reverse topological order: every edge
/// between two different components leads from a later-emitted component to
/// an earlier-emitted one (sinks come first).
std::vector<Component> strongly_connected_components(const Graph& g);

/// States lying on some cycle.
StateSet cyclic_states(const Graph& g);

StateSet reachable_from(const Graph& g, std::span<const StateId> sources);

/// States with some successor in `target`.
StateSet pre_exists(const Graph& g, const StateSet& target);
/// States all of whose successors are in `target`.
StateSet pre_forall(const Graph& g, const StateSet& target);

/// E(hold U goal): backward search from goal through hold.
StateSet exists_until(const Graph& g, const StateSet& hold, const StateSet& goal);
/// A(hold U goal): successor counting from goal through hold.
StateSet forall_until(const Graph& g, const StateSet& hold, const StateSet& goal);
/// E G z: greatest fixpoint, the dual of A F !z.
StateSet exists_globally(const Graph& g, const StateSet& z);

/// Satisfaction set of `A body` / `E body` where the body's state operands
/// are already evaluated (`hold` is only read for Until).
StateSet all_paths(const Graph& g, PathBody::Kind kind, std::uint32_t steps,
                   const StateSet& hold, const StateSet& arg);
StateSet some_path(const Graph& g, PathBody::Kind kind, std::uint32_t steps,
                   const StateSet& hold, const StateSet& arg);

}  // namespace agentcheck

#endif  // AGENTCHECK_GRAPH_HPP
