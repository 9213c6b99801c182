#include "agentcheck/probabilistic.hpp"

#include <algorithm>
#include <cmath>

#include "coalition_keys.hpp"
#include "evaluator.hpp"

namespace agentcheck {

namespace {

// One Jacobi sweep; returns the largest change.
double sweep(const Model& m, const CoalitionKeys& keys, const StateSet& goal,
             const Eigen::VectorXd& in, Eigen::VectorXd& out) {
  double residual = 0;
  std::vector<std::pair<std::uint64_t, double>> groups;
  for (StateId s = 0; s < m.num_states(); ++s) {
    double v = 1.0;
    if (!goal.contains(s)) {
      auto [lo, hi] = m.transitions(s);
      groups.clear();
      for (std::size_t t = lo; t < hi; ++t) {
        double e = 0;
        for (const auto& succ : m.successors(t)) e += succ.probability * in[succ.target];
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == keys.key[t]; });
        if (it == groups.end())
          groups.emplace_back(keys.key[t], e);
        else
          it->second = std::min(it->second, e);
      }
      v = 0;
      for (const auto& g : groups) v = std::max(v, g.second);
      v = std::clamp(v, 0.0, 1.0);
    }
    residual = std::max(residual, std::abs(v - in[s]));
    out[s] = v;
  }
  return residual;
}

}  // namespace

ConvergenceError::ConvergenceError(double residual, std::size_t iterations)
    : CheckError("value iteration did not converge after " + std::to_string(iterations) +
                 " sweeps (residual " + std::to_string(residual) + ")"),
      residual_(residual) {}

ValueVector reach_value(const Model& m, const AgentMask& coalition, const StateSet& goal,
                        std::optional<std::uint32_t> horizon,
                        const ValueIterationOptions& options) {
  CoalitionKeys keys(m, coalition);
  const auto n = static_cast<Eigen::Index>(m.num_states());
  ValueVector result;
  result.values = Eigen::VectorXd::Zero(n);
  for (StateId s : goal.members()) result.values[s] = 1.0;
  Eigen::VectorXd next(n);
  if (horizon) {
    for (std::uint32_t k = 0; k < *horizon; ++k) {
      result.residual = sweep(m, keys, goal, result.values, next);
      result.values.swap(next);
      ++result.iterations;
    }
    return result;
  }
  for (;;) {
    if (result.iterations >= options.max_iter)
      throw ConvergenceError(result.residual, result.iterations);
    result.residual = sweep(m, keys, goal, result.values, next);
    result.values.swap(next);
    ++result.iterations;
    if (result.residual < options.eps) return result;
  }
}

Verdict prob_eval(const Formula& f, const Model& m, const CheckOptions& options) {
  const auto* c = f.as<node::Coalition>();
  if (!c || !c->bound || !std::holds_alternative<ProbabilityBound>(*c->bound))
    throw CheckError("prob_eval expects a coalition formula with a probability bound");
  return detail::evaluate_top(f, m, options);
}

}  // namespace agentcheck
