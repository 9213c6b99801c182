#include "agentcheck/strategic.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <tuple>

#include "coalition_keys.hpp"
#include "evaluator.hpp"

namespace agentcheck {

namespace {

using K = PathBody::Kind;

void require_coalition_body(PathBody::Kind kind) {
  if (kind == K::FinallyGlobally || kind == K::GloballyFinally)
    throw CheckError("F G and G F path bodies are not supported under a coalition operator");
}

// Graph keeping, at every state of `domain`, only the transitions selected
// by `keep`; other states keep everything.
template <class Keep>
Graph restricted_graph(const Model& m, const StateSet& domain, Keep keep) {
  std::vector<std::pair<StateId, StateId>> edges;
  edges.reserve(m.graph().num_edges());
  for (StateId s = 0; s < m.num_states(); ++s) {
    auto [lo, hi] = m.transitions(s);
    const bool restrict = domain.contains(s);
    for (std::size_t t = lo; t < hi; ++t) {
      if (restrict && !keep(s, t)) continue;
      for (const auto& succ : m.successors(t)) edges.emplace_back(s, succ.target);
    }
  }
  return Graph(m.num_states(), std::move(edges));
}

std::vector<ActionId> enabled_actions(const Model& m, StateId s, AgentId a) {
  std::vector<ActionId> out;
  auto [lo, hi] = m.transitions(s);
  for (std::size_t t = lo; t < hi; ++t) out.push_back(m.joint(t)[a]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

// ------------------------------------------------------------ coalition keys

CoalitionKeys::CoalitionKeys(const Model& m, const AgentMask& c) : model(&m) {
  std::vector<std::uint64_t> stride(m.num_agents(), 0);
  std::uint64_t radix = 1;
  for (AgentId a = 0; a < m.num_agents(); ++a) {
    if (!c[a]) continue;
    stride[a] = radix;
    std::uint64_t n = std::max<std::size_t>(1, m.actions(a).size());
    if (radix > std::numeric_limits<std::uint64_t>::max() / n)
      throw CheckError("coalition has too many joint choices");
    radix *= n;
  }
  key.resize(m.num_transitions());
  for (std::size_t t = 0; t < key.size(); ++t) {
    std::uint64_t k = 0;
    auto j = m.joint(t);
    for (AgentId a = 0; a < m.num_agents(); ++a) k += stride[a] * j[a];
    key[t] = k;
  }
}

StateSet CoalitionKeys::pre(const StateSet& target) const {
  const Model& m = *model;
  StateSet out(m.num_states());
  std::vector<std::pair<std::uint64_t, bool>> groups;
  for (StateId s = 0; s < m.num_states(); ++s) {
    auto [lo, hi] = m.transitions(s);
    groups.clear();
    for (std::size_t t = lo; t < hi; ++t) {
      bool ok = true;
      for (const auto& succ : m.successors(t))
        if (!target.contains(succ.target)) {
          ok = false;
          break;
        }
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const auto& g) { return g.first == key[t]; });
      if (it == groups.end())
        groups.emplace_back(key[t], ok);
      else
        it->second = it->second && ok;
    }
    for (const auto& g : groups)
      if (g.second) {
        out.insert(s);
        break;
      }
  }
  return out;
}

AgentMask make_agent_mask(const Model& m, const std::vector<std::string>& agents) {
  AgentMask mask(m.num_agents(), false);
  for (const auto& name : agents) {
    auto a = m.find_agent(name);
    if (!a) throw BindingError({"agent " + name});
    mask[*a] = true;
  }
  return mask;
}

StateSet controllable_pre(const Model& m, const AgentMask& c, const StateSet& target) {
  return CoalitionKeys(m, c).pre(target);
}

StateSet coalition_states(const Model& m, const AgentMask& c, PathBody::Kind kind,
                          std::uint32_t steps, const StateSet& hold, const StateSet& arg) {
  require_coalition_body(kind);
  CoalitionKeys keys(m, c);
  auto lfp = [&](const StateSet& base, const StateSet* guard) {
    StateSet z = base;
    for (;;) {
      StateSet step = keys.pre(z);
      if (guard) step &= *guard;
      StateSet next = base | step;
      if (next == z) return z;
      z = std::move(next);
    }
  };
  switch (kind) {
    case K::Next:
      return keys.pre(arg);
    case K::Finally:
      return lfp(arg, nullptr);
    case K::Until:
      return lfp(arg, &hold);
    case K::Globally: {
      StateSet z = arg;
      for (;;) {
        StateSet next = arg & keys.pre(z);
        if (next == z) return z;
        z = std::move(next);
      }
    }
    case K::BoundedFinally: {
      StateSet z = arg;
      for (std::uint32_t i = 0; i < steps; ++i) z = arg | keys.pre(z);
      return z;
    }
    default:
      break;
  }
  throw CheckError("unsupported coalition path body");
}

// ------------------------------------------------------------------- ir

UniformResult uniform_coalition_states(const Model& m, const AgentMask& c,
                                       PathBody::Kind kind, std::uint32_t steps,
                                       const StateSet& hold, const StateSet& arg,
                                       const StateSet& domain, const StateSet& focus,
                                       std::size_t budget) {
  require_coalition_body(kind);
  struct Choice {
    AgentId agent;
    TokenId token;
    std::vector<ActionId> actions;
  };
  std::vector<Choice> vars;
  // var index per (agent, token)
  std::vector<std::vector<std::int64_t>> var_of(m.num_agents());
  const auto members = domain.members();
  for (AgentId a = 0; a < m.num_agents(); ++a) {
    if (!c[a]) continue;
    var_of[a].assign(m.num_tokens(a), -1);
    std::vector<StateId> first(m.num_tokens(a), std::numeric_limits<StateId>::max());
    for (StateId s : members) {
      TokenId tok = m.local(s, a);
      auto acts = enabled_actions(m, s, a);
      if (var_of[a][tok] < 0) {
        var_of[a][tok] = static_cast<std::int64_t>(vars.size());
        vars.push_back({a, tok, std::move(acts)});
        first[tok] = s;
      } else if (vars[var_of[a][tok]].actions != acts) {
        throw CheckError("uniform strategies need equal enabled actions: agent '" +
                         m.agents()[a] + "' differs between states '" +
                         m.state_name(first[tok]) + "' and '" + m.state_name(s) +
                         "' with local state '" + m.token_name(a, tok) + "'");
      }
    }
  }
  // Enumeration order: agent id, then token id, then action id.
  std::sort(vars.begin(), vars.end(), [](const Choice& x, const Choice& y) {
    return std::tie(x.agent, x.token) < std::tie(y.agent, y.token);
  });
  for (std::size_t i = 0; i < vars.size(); ++i)
    var_of[vars[i].agent][vars[i].token] = static_cast<std::int64_t>(i);

  UniformResult result{StateSet(m.num_states()), true, 0, std::nullopt};
  std::vector<std::size_t> pick(vars.size(), 0);
  const bool want_witness = !focus.empty();
  auto next_choice = [&] {  // odometer, last variable fastest
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (++pick[i] < vars[i].actions.size()) return true;
      pick[i] = 0;
    }
    return false;
  };
  for (;;) {
    ++result.strategies_tried;
    Graph g = restricted_graph(m, domain, [&](StateId s, std::size_t t) {
      auto j = m.joint(t);
      for (AgentId a = 0; a < m.num_agents(); ++a) {
        if (!c[a]) continue;
        const auto& v = vars[static_cast<std::size_t>(var_of[a][m.local(s, a)])];
        if (j[a] != v.actions[pick[static_cast<std::size_t>(var_of[a][m.local(s, a)])]])
          return false;
      }
      return true;
    });
    StateSet won = all_paths(g, kind, steps, hold, arg) & domain;
    if (want_witness && !result.witness && focus.is_subset_of(won)) {
      std::string w;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) w += ", ";
        w += m.agents()[vars[i].agent] + ":" + m.token_name(vars[i].agent, vars[i].token) +
             "=" + m.actions(vars[i].agent)[vars[i].actions[pick[i]]];
      }
      result.witness = "{" + w + "}";
    }
    result.sat |= won;
    if (result.sat == domain && (!want_witness || result.witness)) break;

    if (!next_choice()) break;
    if (result.strategies_tried >= budget) {
      result.complete = false;
      break;
    }
  }
  return result;
}

// -------------------------------------------------------------- natural

std::uint32_t NaturalStrategy::complexity() const {
  std::uint32_t total = 0;
  for (const auto& r : rules) total += std::max<std::uint32_t>(1, static_cast<std::uint32_t>(r.guard.size()));
  return total;
}

std::string NaturalStrategy::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (i) out += ", ";
    if (rules[i].guard.empty()) out += "true";
    for (std::size_t k = 0; k < rules[i].guard.size(); ++k) {
      if (k) out += " & ";
      out += (rules[i].guard[k].positive ? "" : "!") + rules[i].guard[k].atom;
    }
    out += " -> " + rules[i].action;
  }
  return out + "]";
}

namespace {

struct ResolvedRule {
  std::vector<std::pair<AtomId, bool>> guard;
  ActionId action;
};

std::vector<ResolvedRule> resolve(const Model& m, AgentId a, const NaturalStrategy& s) {
  if (s.rules.empty() || !s.rules.back().guard.empty())
    throw CheckError("natural strategy for '" + s.agent + "' must end with a `true` rule");
  std::vector<ResolvedRule> out;
  for (const auto& r : s.rules) {
    ResolvedRule rr;
    for (const auto& lit : r.guard) {
      auto atom = m.find_atom(lit.atom);
      const auto& obs = m.observable(a);
      if (!atom || std::find(obs.begin(), obs.end(), *atom) == obs.end())
        throw CheckError("natural strategy guard uses atom '" + lit.atom +
                         "' not observable to '" + s.agent + "'");
      rr.guard.emplace_back(*atom, lit.positive);
    }
    auto act = m.find_action(a, r.action);
    if (!act) throw CheckError("unknown action '" + r.action + "' for agent '" + s.agent + "'");
    rr.action = *act;
    out.push_back(std::move(rr));
  }
  return out;
}

ActionId fired_action(const Model& m, const std::vector<ResolvedRule>& rules, StateId s) {
  for (const auto& r : rules) {
    bool ok = true;
    for (auto [atom, positive] : r.guard)
      if (m.holds(atom, s) != positive) {
        ok = false;
        break;
      }
    if (ok) return r.action;
  }
  return rules.back().action;
}

bool is_enabled(const Model& m, StateId s, AgentId a, ActionId act) {
  auto [lo, hi] = m.transitions(s);
  for (std::size_t t = lo; t < hi; ++t)
    if (m.joint(t)[a] == act) return true;
  return false;
}

}  // namespace

void validate_natural_strategy(const Model& m, const NaturalStrategy& s, const StateSet& domain) {
  auto a = m.find_agent(s.agent);
  if (!a) throw BindingError({"agent " + s.agent});
  auto rules = resolve(m, *a, s);
  for (StateId st : domain.members()) {
    ActionId act = fired_action(m, rules, st);
    if (!is_enabled(m, st, *a, act))
      throw CheckError("natural strategy selects action '" + m.actions(*a)[act] +
                       "' which is not enabled in state '" + m.state_name(st) + "'");
  }
}

StateSet natural_strategy_states(const Model& m, const NaturalStrategy& s, PathBody::Kind kind,
                                 std::uint32_t steps, const StateSet& hold, const StateSet& arg,
                                 const StateSet& domain) {
  require_coalition_body(kind);
  validate_natural_strategy(m, s, domain);
  AgentId a = *m.find_agent(s.agent);
  auto rules = resolve(m, a, s);
  Graph g = restricted_graph(m, domain, [&](StateId st, std::size_t t) {
    return m.joint(t)[a] == fired_action(m, rules, st);
  });
  return all_paths(g, kind, steps, hold, arg) & domain;
}

NaturalResult natural_coalition_states(const Model& m, AgentId agent, std::uint32_t limit,
                                       std::uint32_t literals, std::uint32_t rules,
                                       PathBody::Kind kind, std::uint32_t steps,
                                       const StateSet& hold, const StateSet& arg,
                                       const StateSet& domain, const StateSet& focus,
                                       std::size_t budget) {
  require_coalition_body(kind);
  NaturalResult result{StateSet(m.num_states()), true, 0, 0, std::nullopt};
  const auto& obs = m.observable(agent);
  if (obs.size() > 63) throw CheckError("too many observable atoms for natural strategies");
  const std::size_t nactions = m.actions(agent).size();

  // Observation classes occurring in the domain, with the actions enabled
  // in every one of their states.
  std::map<std::uint64_t, std::size_t> class_index;
  std::vector<std::uint64_t> class_mask;
  std::vector<std::vector<bool>> allowed;
  std::vector<std::size_t> class_of(m.num_states(), 0);
  for (StateId s : domain.members()) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < obs.size(); ++i)
      if (m.holds(obs[i], s)) mask |= 1ULL << i;
    auto [it, inserted] = class_index.emplace(mask, class_mask.size());
    if (inserted) {
      class_mask.push_back(mask);
      allowed.emplace_back(nactions, true);
    }
    class_of[s] = it->second;
    std::vector<bool> here(nactions, false);
    for (ActionId act : enabled_actions(m, s, agent)) here[act] = true;
    for (std::size_t k = 0; k < nactions; ++k) allowed[it->second][k] = allowed[it->second][k] && here[k];
  }
  const std::size_t nclasses = class_mask.size();

  // Guards: conjunctions of 1..literals distinct-atom literals, smallest first.
  std::vector<std::vector<std::pair<std::size_t, bool>>> guards;
  {
    std::vector<std::pair<std::size_t, bool>> cur;
    std::function<void(std::size_t, std::size_t)> gen = [&](std::size_t start, std::size_t size) {
      if (cur.size() == size) {
        guards.push_back(cur);
        return;
      }
      for (std::size_t i = start; i < obs.size(); ++i)
        for (bool pos : {true, false}) {
          cur.emplace_back(i, pos);
          gen(i + 1, size);
          cur.pop_back();
        }
    };
    for (std::size_t size = 1; size <= std::min<std::size_t>(literals, obs.size()); ++size)
      gen(0, size);
  }
  auto matches = [&](const std::vector<std::pair<std::size_t, bool>>& g, std::size_t cls) {
    for (auto [i, pos] : g)
      if (((class_mask[cls] >> i) & 1ULL) != static_cast<std::uint64_t>(pos)) return false;
    return true;
  };

  struct Found {
    NaturalStrategy strategy;
    std::vector<ActionId> choice;  // per class
    std::size_t order;
  };
  std::map<std::vector<ActionId>, std::size_t> seen;
  std::vector<Found> found;
  std::vector<ActionId> choice(nclasses, 0);
  std::vector<bool> claimed(nclasses, false);
  NaturalStrategy cur;
  cur.agent = m.agents()[agent];
  bool stop = false;

  std::function<void(std::uint32_t)> extend = [&](std::uint32_t used) {
    if (stop) return;
    // Close with a catch-all rule.
    if (used + 1 <= limit && cur.rules.size() + 1 <= rules) {
      for (ActionId act = 0; act < nactions && !stop; ++act) {
        bool ok = true;
        bool any = false;
        for (std::size_t k = 0; k < nclasses; ++k)
          if (!claimed[k]) {
            any = true;
            ok = ok && allowed[k][act];
          }
        if (!ok) continue;
        if (++result.candidates > budget) {
          result.complete = false;
          stop = true;
          return;
        }
        std::vector<ActionId> full = choice;
        for (std::size_t k = 0; k < nclasses; ++k)
          if (!claimed[k]) full[k] = act;
        cur.rules.push_back({{}, m.actions(agent)[act]});
        auto [it, inserted] = seen.emplace(full, found.size());
        if (inserted)
          found.push_back({cur, full, found.size()});
        else if (cur.complexity() < found[it->second].strategy.complexity())
          found[it->second].strategy = cur;
        cur.rules.pop_back();
        if (!any) break;  // every catch-all induces the same choice
      }
    }
    // Or add a guarded rule that fires somewhere new.
    for (const auto& g : guards) {
      if (stop) return;
      const auto cost = static_cast<std::uint32_t>(g.size());
      if (used + cost + 1 > limit || cur.rules.size() + 2 > rules) continue;
      std::vector<std::size_t> hit;
      for (std::size_t k = 0; k < nclasses; ++k)
        if (!claimed[k] && matches(g, k)) hit.push_back(k);
      if (hit.empty()) continue;
      for (ActionId act = 0; act < nactions; ++act) {
        bool ok = true;
        for (std::size_t k : hit) ok = ok && allowed[k][act];
        if (!ok) continue;
        for (std::size_t k : hit) {
          claimed[k] = true;
          choice[k] = act;
        }
        NaturalRule rule;
        for (auto [i, pos] : g) rule.guard.push_back({m.atoms()[obs[i]], pos});
        rule.action = m.actions(agent)[act];
        cur.rules.push_back(std::move(rule));
        extend(used + cost);
        cur.rules.pop_back();
        for (std::size_t k : hit) claimed[k] = false;
        if (stop) return;
      }
    }
  };
  if (limit >= 1 && rules >= 1) extend(0);
  result.distinct = found.size();

  std::sort(found.begin(), found.end(), [](const Found& x, const Found& y) {
    auto cx = x.strategy.complexity(), cy = y.strategy.complexity();
    return cx != cy ? cx < cy : x.order < y.order;
  });
  const bool want_witness = !focus.empty();
  for (const auto& f : found) {
    Graph g = restricted_graph(m, domain, [&](StateId s, std::size_t t) {
      return m.joint(t)[agent] == f.choice[class_of[s]];
    });
    StateSet won = all_paths(g, kind, steps, hold, arg) & domain;
    if (want_witness && !result.witness && focus.is_subset_of(won)) result.witness = f.strategy;
    result.sat |= won;
    if (result.sat == domain && (!want_witness || result.witness)) break;
  }
  return result;
}

// --------------------------------------------------------- entry points

Verdict atl_eval(const Formula& f, const Model& m, const CheckOptions& options) {
  const auto* c = f.as<node::Coalition>();
  if (!c || c->bound) throw CheckError("atl_eval expects a coalition formula without bound");
  return detail::evaluate_top(f, m, options);
}

Verdict atl_eval_natural(const Formula& f, const Model& m, const CheckOptions& options) {
  const auto* c = f.as<node::Coalition>();
  if (!c || !c->bound || !std::holds_alternative<ComplexityBound>(*c->bound))
    throw CheckError("atl_eval_natural expects a coalition formula with a complexity bound");
  return detail::evaluate_top(f, m, options);
}

Verdict verify_natural(const Formula& f, const Model& m, const NaturalStrategy& s,
                       const CheckOptions& options) {
  const auto* c = f.as<node::Coalition>();
  if (!c || c->agents.size() != 1 || c->agents.front() != s.agent)
    throw CheckError("verify_natural expects a coalition of the strategy's agent alone");
  if (c->bound)
    if (const auto* cb = std::get_if<ComplexityBound>(&*c->bound); cb && s.complexity() > cb->limit)
      throw CheckError("strategy complexity " + std::to_string(s.complexity()) +
                       " exceeds the bound " + std::to_string(cb->limit));
  // Operands are evaluated by the general evaluator; the body is then
  // checked against the one strategy.
  detail::Evaluator ev(m, options);
  const StateSet all(m.num_states(), true);
  auto operand = [&](const Formula& g) {
    auto sat = ev.eval(g);
    if (!(sat.lower == sat.upper))
      throw CheckError("operand verdict unknown within budget: " + print(g));
    return sat.lower;
  };
  StateSet arg = operand(c->body.arg);
  StateSet hold = c->body.hold ? operand(*c->body.hold) : all;
  StateSet won = natural_strategy_states(m, s, c->body.kind, c->body.steps, hold, arg,
                                         ev.reachable());
  Verdict v{f, nullptr, won, won, ev.reachable(), true, Truth::True, std::nullopt,
            std::nullopt, s.to_string()};
  for (StateId init : m.initial())
    if (!won.contains(init)) {
      v.holds_initially = false;
      v.truth = Truth::False;
      v.witness = Witness{{init}, std::nullopt, "strategy loses from this initial state"};
      break;
    }
  return v;
}

Verdict suppose_eval(const Formula& f, const Model& m, const CheckOptions& options) {
  if (!f.is<node::Suppose>()) throw CheckError("suppose_eval expects a supp formula");
  return detail::evaluate_top(f, m, options);
}

}  // namespace agentcheck
