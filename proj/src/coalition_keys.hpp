#ifndef AGENTCHECK_SRC_COALITION_KEYS_HPP
#define AGENTCHECK_SRC_COALITION_KEYS_HPP

#include <cstdint>
#include <vector>

#include "agentcheck/model.hpp"
#include "agentcheck/strategic.hpp"

namespace agentcheck {

// Per-transition encoding of the coalition's part of the joint action, so
// transitions of one state can be grouped by the coalition's choice.
struct CoalitionKeys {
  CoalitionKeys(const Model& m, const AgentMask& c);

  // Controllable predecessor of `target`.
  StateSet pre(const StateSet& target) const;

  const Model* model;
  std::vector<std::uint64_t> key;
};

}  // namespace agentcheck

#endif  // AGENTCHECK_SRC_COALITION_KEYS_HPP
