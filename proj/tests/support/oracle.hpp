// Brute-force reference semantics used to cross-check the checkers.
//
// Path quantifiers enumerate every simple lasso (a path without repeated
// states closed by an edge back into itself): for the supported path
// shapes a path satisfying the body exists iff a simple lasso does.
// Knowledge compares against the reachable states of the same token class.
// Coalitions enumerate memoryless strategies, per state or per token.
#ifndef AGENTCHECK_TESTS_ORACLE_HPP
#define AGENTCHECK_TESTS_ORACLE_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "agentcheck/formula.hpp"
#include "agentcheck/model.hpp"

namespace agentcheck::testing {

class BruteForce {
 public:
  /// `uniform`: coalition strategies choose per local token (ir).
  explicit BruteForce(const Model& m, bool uniform = false);

  /// Truth value per state. Supports everything except ONCE, supp, bounds,
  /// macros and quantifiers.
  std::vector<bool> eval(const Formula& f);

  const std::vector<bool>& reachable() const { return reach_; }

 private:
  using Adjacency = std::vector<std::vector<StateId>>;

  std::vector<bool> path(const PathBody& body, bool universal, const Adjacency& adj);
  std::vector<bool> coalition(const node::Coalition& c);

  const Model& m_;
  bool uniform_;
  Adjacency succ_;
  std::vector<bool> reach_;
};

/// Calls `visit(path, loop_start)` for every simple lasso starting at `s`;
/// stops early when visit returns false. Returns false iff stopped.
bool for_each_lasso(const std::vector<std::vector<StateId>>& adj, StateId s,
                    const std::function<bool(const std::vector<StateId>&, std::size_t)>& visit);

/// Body semantics on the infinite word path[0..loop) (path[loop..])^omega,
/// given the truth of the operands per state.
bool lasso_satisfies(const std::vector<StateId>& path, std::size_t loop, PathBody::Kind kind,
                     std::uint32_t steps, const std::vector<bool>& hold,
                     const std::vector<bool>& arg);

/// Reachability probability in a Markov chain given as a dense transition
/// matrix, by solving the linear system on states that can reach the goal.
Eigen::VectorXd chain_reach(const Eigen::MatrixXd& p, const std::vector<bool>& goal);

/// Maximal reachability probability when one controller picks every joint
/// action: pointwise maximum over all memoryless deterministic policies.
Eigen::VectorXd mdp_max_reach(const Model& m, const std::vector<bool>& goal);

}  // namespace agentcheck::testing

#endif
