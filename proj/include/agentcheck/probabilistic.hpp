// Guaranteed reachability probabilities in the stochastic game induced by a
// model: the coalition maximises, the other agents minimise, and nature
// resolves each joint action's distribution.

#ifndef AGENTCHECK_PROBABILISTIC_HPP
#define AGENTCHECK_PROBABILISTIC_HPP

#include <cstddef>
#include <optional>

#include <Eigen/Core>

#include "agentcheck/model.hpp"
#include "agentcheck/strategic.hpp"
#include "agentcheck/verdict.hpp"

namespace agentcheck {

struct ValueVector {
  Eigen::VectorXd values;  // indexed by state id, each in [0,1]
  std::size_t iterations = 0;
  double residual = 0;  // max absolute change in the last sweep

  double operator[](StateId s) const { return values[static_cast<Eigen::Index>(s)]; }
};

struct ValueIterationOptions {
  double eps = 1e-8;
  std::size_t max_iter = 100000;
};

/// Unbounded (`horizon` empty): sweeps until the residual drops below eps,
/// throwing ConvergenceError after max_iter sweeps. Bounded: exactly
/// `*horizon` sweeps, giving the probability of reaching `goal` within that
/// many steps.
ValueVector reach_value(const Model& m, const AgentMask& coalition, const StateSet& goal,
                        std::optional<std::uint32_t> horizon = std::nullopt,
                        const ValueIterationOptions& options = {});

/// <<A>>[P>=p] F f or <<A>>[P>=p] F<=k f.
Verdict prob_eval(const Formula& f, const Model& m, const CheckOptions& options = {});

}  // namespace agentcheck

#endif  // AGENTCHECK_PROBABILISTIC_HPP
