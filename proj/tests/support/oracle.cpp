#include "oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include "agentcheck/strategic.hpp"

namespace agentcheck::testing {

namespace {

bool lasso_dfs(const std::vector<std::vector<StateId>>& adj, std::vector<StateId>& path,
               std::vector<int>& index,
               const std::function<bool(const std::vector<StateId>&, std::size_t)>& visit) {
  StateId last = path.back();
  for (StateId t : adj[last]) {
    if (index[t] >= 0) {
      if (!visit(path, static_cast<std::size_t>(index[t]))) return false;
      continue;
    }
    index[t] = static_cast<int>(path.size());
    path.push_back(t);
    bool go_on = lasso_dfs(adj, path, index, visit);
    path.pop_back();
    index[t] = -1;
    if (!go_on) return false;
  }
  return true;
}

}  // namespace

bool for_each_lasso(const std::vector<std::vector<StateId>>& adj, StateId s,
                    const std::function<bool(const std::vector<StateId>&, std::size_t)>& visit) {
  std::vector<StateId> path{s};
  std::vector<int> index(adj.size(), -1);
  index[s] = 0;
  return lasso_dfs(adj, path, index, visit);
}

bool lasso_satisfies(const std::vector<StateId>& path, std::size_t loop, PathBody::Kind kind,
                     std::uint32_t steps, const std::vector<bool>& hold,
                     const std::vector<bool>& arg) {
  const std::size_t len = path.size();
  auto next = [&](std::size_t i) { return i + 1 < len ? i + 1 : loop; };
  using K = PathBody::Kind;
  switch (kind) {
    case K::Next:
      return arg[path[next(0)]];
    case K::Finally:
      return std::any_of(path.begin(), path.end(), [&](StateId s) { return arg[s]; });
    case K::Globally:
      return std::all_of(path.begin(), path.end(), [&](StateId s) { return arg[s]; });
    case K::Until:
      for (std::size_t i = 0; i < len; ++i) {
        if (arg[path[i]]) return true;
        if (!hold[path[i]]) return false;
      }
      return false;
    case K::BoundedFinally: {
      std::size_t i = 0;
      for (std::uint32_t k = 0; k <= steps; ++k, i = next(i))
        if (arg[path[i]]) return true;
      return false;
    }
    case K::FinallyGlobally:
      return std::all_of(path.begin() + loop, path.end(), [&](StateId s) { return arg[s]; });
    case K::GloballyFinally:
      return std::any_of(path.begin() + loop, path.end(), [&](StateId s) { return arg[s]; });
  }
  return false;
}

BruteForce::BruteForce(const Model& m, bool uniform) : m_(m), uniform_(uniform) {
  const auto n = m.num_states();
  succ_.resize(n);
  for (StateId s = 0; s < n; ++s) {
    auto [lo, hi] = m.transitions(s);
    for (auto t = lo; t < hi; ++t)
      for (const auto& x : m.successors(t))
        if (std::find(succ_[s].begin(), succ_[s].end(), x.target) == succ_[s].end())
          succ_[s].push_back(x.target);
  }
  reach_.assign(n, false);
  std::vector<StateId> stack(m.initial().begin(), m.initial().end());
  for (StateId s : stack) reach_[s] = true;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId t : succ_[s])
      if (!reach_[t]) {
        reach_[t] = true;
        stack.push_back(t);
      }
  }
}

std::vector<bool> BruteForce::path(const PathBody& body, bool universal, const Adjacency& adj) {
  std::vector<bool> arg = eval(body.arg);
  std::vector<bool> hold = body.hold ? eval(*body.hold) : std::vector<bool>(arg.size(), true);
  std::vector<bool> out(arg.size());
  for (StateId s = 0; s < arg.size(); ++s) {
    bool found = false;  // lasso deciding the answer
    for_each_lasso(adj, s, [&](const std::vector<StateId>& p, std::size_t loop) {
      bool sat = lasso_satisfies(p, loop, body.kind, body.steps, hold, arg);
      if (sat != universal) {
        found = true;
        return false;
      }
      return true;
    });
    out[s] = universal ? !found : found;
  }
  return out;
}

std::vector<bool> BruteForce::coalition(const node::Coalition& c) {
  const auto n = m_.num_states();
  AgentMask mask = make_agent_mask(m_, c.agents);
  std::vector<AgentId> members;
  for (AgentId a = 0; a < mask.size(); ++a)
    if (mask[a]) members.push_back(a);

  // Choice variables: (agent, state) or (agent, token), with their options.
  struct Var {
    AgentId agent;
    std::uint32_t key;
    std::vector<ActionId> options;
  };
  std::vector<Var> vars;
  auto var_index = [&](AgentId a, StateId s) -> std::size_t {
    std::uint32_t key = uniform_ ? m_.local(s, a) : s;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].agent == a && vars[i].key == key) return i;
    return vars.size();
  };
  for (AgentId a : members)
    for (StateId s = 0; s < n; ++s) {
      std::size_t i = var_index(a, s);
      std::vector<ActionId> enabled;
      auto [lo, hi] = m_.transitions(s);
      for (auto t = lo; t < hi; ++t) {
        ActionId act = m_.joint(t)[a];
        if (std::find(enabled.begin(), enabled.end(), act) == enabled.end())
          enabled.push_back(act);
      }
      std::sort(enabled.begin(), enabled.end());
      if (i == vars.size()) {
        vars.push_back({a, uniform_ ? m_.local(s, a) : s, enabled});
      } else if (vars[i].options != enabled) {
        throw std::logic_error("oracle: enabled actions differ within a token class");
      }
    }

  std::vector<bool> out(n, false);
  std::vector<std::size_t> pick(vars.size(), 0);
  for (;;) {
    Adjacency adj(n);
    for (StateId s = 0; s < n; ++s) {
      auto [lo, hi] = m_.transitions(s);
      for (auto t = lo; t < hi; ++t) {
        bool match = true;
        for (AgentId a : members)
          if (m_.joint(t)[a] != vars[var_index(a, s)].options[pick[var_index(a, s)]]) match = false;
        if (!match) continue;
        for (const auto& x : m_.successors(t))
          if (std::find(adj[s].begin(), adj[s].end(), x.target) == adj[s].end())
            adj[s].push_back(x.target);
      }
    }
    auto win = path(c.body, true, adj);
    for (StateId s = 0; s < n; ++s) out[s] = out[s] || win[s];
    std::size_t i = 0;
    while (i < vars.size() && ++pick[i] == vars[i].options.size()) pick[i++] = 0;
    if (i == vars.size()) break;
  }
  return out;
}

std::vector<bool> BruteForce::eval(const Formula& f) {
  const auto n = m_.num_states();
  if (auto* c = f.as<node::Constant>()) return std::vector<bool>(n, c->value);
  if (auto* a = f.as<node::Atom>()) {
    auto id = m_.find_atom(atom_symbol(*a));
    if (!id) throw std::logic_error("oracle: unknown atom");
    std::vector<bool> out(n);
    for (StateId s = 0; s < n; ++s) out[s] = m_.holds(*id, s);
    return out;
  }
  if (auto* c = f.as<node::Compare>()) {
    auto feature = *m_.find_feature(c->feature);
    std::vector<bool> out(n);
    for (StateId s = 0; s < n; ++s)
      out[s] = compare(m_.feature_value(s, feature), c->op, std::get<std::int64_t>(c->rhs));
    return out;
  }
  if (auto* x = f.as<node::Not>()) {
    auto v = eval(x->arg);
    v.flip();
    return v;
  }
  if (auto* b = f.as<node::Binary>()) {
    auto l = eval(b->lhs), r = eval(b->rhs);
    std::vector<bool> out(n);
    for (StateId s = 0; s < n; ++s)
      out[s] = b->op == BinaryOp::And  ? l[s] && r[s]
               : b->op == BinaryOp::Or ? l[s] || r[s]
                                       : !l[s] || r[s];
    return out;
  }
  if (auto* q = f.as<node::PathQuantifier>()) return path(q->body, q->universal, succ_);
  if (auto* k = f.as<node::Knows>()) {
    auto arg = eval(k->arg);
    AgentId a = *m_.find_agent(k->agent);
    std::vector<bool> out(n, true);
    for (StateId s = 0; s < n; ++s)
      for (StateId t = 0; t < n; ++t)
        if (reach_[t] && m_.local(t, a) == m_.local(s, a) && !arg[t]) out[s] = false;
    return out;
  }
  if (auto* c = f.as<node::Coalition>()) {
    if (c->bound) throw std::logic_error("oracle: bounded coalition");
    return coalition(*c);
  }
  throw std::logic_error("oracle: unsupported construct " + print(f));
}

Eigen::VectorXd chain_reach(const Eigen::MatrixXd& p, const std::vector<bool>& goal) {
  const auto n = p.rows();
  // States that can reach the goal with positive probability.
  std::vector<bool> live(goal);
  for (bool changed = true; changed;) {
    changed = false;
    for (Eigen::Index s = 0; s < n; ++s) {
      if (live[s]) continue;
      for (Eigen::Index t = 0; t < n; ++t)
        if (p(s, t) > 0 && live[t]) {
          live[s] = changed = true;
          break;
        }
    }
  }
  std::vector<Eigen::Index> unknown;
  for (Eigen::Index s = 0; s < n; ++s)
    if (live[s] && !goal[s]) unknown.push_back(s);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (Eigen::Index s = 0; s < n; ++s)
    if (goal[s]) v[s] = 1.0;
  const auto k = static_cast<Eigen::Index>(unknown.size());
  if (k == 0) return v;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) -= p(unknown[i], unknown[j]);
    for (Eigen::Index t = 0; t < n; ++t)
      if (goal[t]) b[i] += p(unknown[i], t);
  }
  Eigen::VectorXd x = a.partialPivLu().solve(b);
  for (Eigen::Index i = 0; i < k; ++i) v[unknown[i]] = x[i];
  return v;
}

Eigen::VectorXd mdp_max_reach(const Model& m, const std::vector<bool>& goal) {
  const auto n = static_cast<Eigen::Index>(m.num_states());
  std::vector<std::size_t> pick(n, 0), count(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    auto [lo, hi] = m.transitions(s);
    count[s] = hi - lo;
  }
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  for (;;) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index s = 0; s < n; ++s) {
      auto t = m.transitions(s).first + pick[s];
      for (const auto& x : m.successors(t)) p(s, x.target) += x.probability;
    }
    best = best.cwiseMax(chain_reach(p, goal));
    Eigen::Index i = 0;
    while (i < n && ++pick[i] == count[i]) pick[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace agentcheck::testing
