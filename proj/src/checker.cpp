#include "agentcheck/checker.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "agentcheck/probabilistic.hpp"
#include "agentcheck/rewrite.hpp"
#include "agentcheck/strategic.hpp"
#include "evaluator.hpp"

namespace agentcheck {

std::string_view to_string(CheckMode mode) {
  return mode == CheckMode::PerfectInformation ? "IR" : "ir";
}

std::optional<CheckMode> parse_check_mode(std::string_view text) {
  if (text == "IR") return CheckMode::PerfectInformation;
  if (text == "ir") return CheckMode::Uniform;
  return std::nullopt;
}

std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::True:
      return "true";
    case Truth::False:
      return "false";
    case Truth::Unknown:
      return "unknown-within-budget";
  }
  return "?";
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

BindingError::BindingError(std::vector<std::string> missing)
    : CheckError("formula refers to names absent from the model: " + join(missing)),
      missing_(std::move(missing)) {}

namespace detail {

using K = PathBody::Kind;

Evaluator::Evaluator(const Model& m, const CheckOptions& options)
    : m_(m), options_(options), reach_(agentcheck::reachable(m)) {}

Sat Evaluator::eval(const Formula& f) {
  if (!top_) top_ = f.id();
  if (auto it = memo_.find(f.id()); it != memo_.end()) return it->second;
  Sat s = eval_node(f);
  memo_.emplace(f.id(), s);
  return s;
}

Sat Evaluator::eval_node(const Formula& f) {
  const std::size_t n = m_.num_states();
  const auto& v = f.node().value;
  auto exact = [](StateSet s) { return Sat{s, s}; };

  if (const auto* c = std::get_if<node::Constant>(&v)) return exact(StateSet(n, c->value));
  if (const auto* a = std::get_if<node::Atom>(&v)) {
    std::string name = atom_symbol(*a);
    auto id = m_.find_atom(name);
    if (!id) throw BindingError({"atom " + name});
    return exact(m_.atom_states(*id));
  }
  if (std::holds_alternative<node::Compare>(v)) {
    try {
      return exact(predicate_states(m_, f));
    } catch (const ModelError&) {
      throw BindingError({"feature " + std::get<node::Compare>(v).feature});
    }
  }
  if (const auto* x = std::get_if<node::Not>(&v)) {
    Sat a = eval(x->arg);
    return {~a.upper, ~a.lower};
  }
  if (const auto* b = std::get_if<node::Binary>(&v)) {
    Sat l = eval(b->lhs), r = eval(b->rhs);
    switch (b->op) {
      case BinaryOp::And:
        return {l.lower & r.lower, l.upper & r.upper};
      case BinaryOp::Or:
        return {l.lower | r.lower, l.upper | r.upper};
      case BinaryOp::Implies:
        return {~l.upper | r.lower, ~l.lower | r.upper};
    }
  }
  if (const auto* q = std::get_if<node::PathQuantifier>(&v)) return eval_path(*q);
  if (const auto* c = std::get_if<node::Coalition>(&v)) return eval_coalition(f, *c);
  if (const auto* k = std::get_if<node::Knows>(&v)) return eval_knows(*k);
  if (const auto* s = std::get_if<node::Suppose>(&v)) return eval_suppose(*s);
  if (std::holds_alternative<node::Once>(v))
    throw CheckError("ONCE must be compiled to monitor atoms before evaluation: " + print(f));
  if (std::holds_alternative<node::Quantifier>(v))
    throw CheckError("quantifiers must be expanded before evaluation: " + print(f));
  if (std::holds_alternative<node::Macro>(v))
    throw CheckError("macros must be expanded before evaluation: " + print(f));
  throw CheckError("unsupported formula: " + print(f));
}

Sat Evaluator::eval_path(const node::PathQuantifier& q) {
  const auto& body = q.body;
  Sat arg = eval(body.arg);
  Sat hold = body.hold ? eval(*body.hold) : Sat{StateSet(m_.num_states(), true),
                                                 StateSet(m_.num_states(), true)};
  auto run = [&](const StateSet& h, const StateSet& a) {
    return q.universal ? all_paths(m_.graph(), body.kind, body.steps, h, a)
                       : some_path(m_.graph(), body.kind, body.steps, h, a);
  };
  StateSet lower = run(hold.lower, arg.lower);
  if (hold.lower == hold.upper && arg.lower == arg.upper) return {lower, lower};
  return {lower, run(hold.upper, arg.upper)};
}

Sat Evaluator::eval_knows(const node::Knows& k) {
  auto agent = m_.find_agent(k.agent);
  if (!agent) throw BindingError({"agent " + k.agent});
  Sat arg = eval(k.arg);
  auto knows = [&](const StateSet& sat) {
    std::vector<char> ok(m_.num_tokens(*agent), 1);
    for (StateId s : reach_.members())
      if (!sat.contains(s)) ok[m_.local(s, *agent)] = 0;
    StateSet out(m_.num_states());
    for (StateId s = 0; s < m_.num_states(); ++s)
      if (ok[m_.local(s, *agent)]) out.insert(s);
    return out;
  };
  StateSet lower = knows(arg.lower);
  if (arg.lower == arg.upper) return {lower, lower};
  return {lower, knows(arg.upper)};
}

Sat Evaluator::eval_coalition(const Formula& f, const node::Coalition& c) {
  const auto& body = c.body;
  AgentMask mask = make_agent_mask(m_, c.agents);
  Sat arg = eval(body.arg);
  const StateSet all(m_.num_states(), true);
  Sat hold = body.hold ? eval(*body.hold) : Sat{all, all};
  const bool exact_args = arg.lower == arg.upper && hold.lower == hold.upper;
  const bool top = f.id() == top_;
  StateSet focus(m_.num_states());
  if (top)
    for (StateId s : m_.initial()) focus.insert(s);

  auto perfect = [&](const StateSet& h, const StateSet& a) {
    return coalition_states(m_, mask, body.kind, body.steps, h, a);
  };

  if (!c.bound) {
    if (options_.mode == CheckMode::PerfectInformation) {
      StateSet lower = perfect(hold.lower, arg.lower);
      return {lower, exact_args ? lower : perfect(hold.upper, arg.upper)};
    }
    auto uniform = [&](const StateSet& h, const StateSet& a, const StateSet& foc) {
      return uniform_coalition_states(m_, mask, body.kind, body.steps, h, a, reach_, foc,
                                      options_.max_uniform_strategies);
    };
    UniformResult lo = uniform(hold.lower, arg.lower, focus);
    if (top && lo.witness) top_strategy = *lo.witness;
    if (!lo.complete) return {lo.sat, perfect(hold.upper, arg.upper)};
    if (exact_args) return {lo.sat, lo.sat};
    UniformResult hi = uniform(hold.upper, arg.upper, StateSet(m_.num_states()));
    return {lo.sat, hi.complete ? hi.sat : perfect(hold.upper, arg.upper)};
  }

  if (const auto* cb = std::get_if<ComplexityBound>(&*c.bound)) {
    if (c.agents.size() != 1)
      throw CheckError("a complexity bound requires a single-agent coalition");
    AgentId agent = *m_.find_agent(c.agents.front());
    const std::uint32_t limit = cb->limit;
    const std::uint32_t literals =
        options_.guard_literals ? options_.guard_literals : (limit > 0 ? limit - 1 : 0);
    const std::uint32_t rules = options_.rules ? options_.rules : limit;
    auto natural = [&](const StateSet& h, const StateSet& a, const StateSet& foc) {
      return natural_coalition_states(m_, agent, limit, literals, rules, body.kind, body.steps,
                                      h, a, reach_, foc, options_.max_natural_candidates);
    };
    NaturalResult lo = natural(hold.lower, arg.lower, focus);
    if (top && lo.witness) top_strategy = lo.witness->to_string();
    if (!lo.complete) return {lo.sat, perfect(hold.upper, arg.upper)};
    if (exact_args) return {lo.sat, lo.sat};
    NaturalResult hi = natural(hold.upper, arg.upper, StateSet(m_.num_states()));
    return {lo.sat, hi.complete ? hi.sat : perfect(hold.upper, arg.upper)};
  }

  const double p = std::get<ProbabilityBound>(*c.bound).threshold;
  if (body.kind != K::Finally && body.kind != K::BoundedFinally)
    throw CheckError("a probability bound supports only F and F<=k bodies: " + print(f));
  std::optional<std::uint32_t> horizon;
  if (body.kind == K::BoundedFinally) horizon = body.steps;
  ValueIterationOptions vi{options_.eps, options_.max_iter};
  auto threshold = [&](const ValueVector& values) {
    StateSet out(m_.num_states());
    for (StateId s = 0; s < m_.num_states(); ++s)
      if (values[s] >= p - options_.eps_compare) out.insert(s);
    return out;
  };
  ValueVector lo = reach_value(m_, mask, arg.lower, horizon, vi);
  if (top) {
    double v = 1.0;
    for (StateId s : m_.initial()) v = std::min(v, lo[s]);
    top_value = v;
  }
  StateSet lower = threshold(lo);
  if (arg.lower == arg.upper) return {lower, lower};
  return {lower, threshold(reach_value(m_, mask, arg.upper, horizon, vi))};
}

Sat Evaluator::eval_suppose(const node::Suppose& s) {
  auto it = pruned_.find(s.strategy);
  if (it == pruned_.end()) {
    const Strategy* found = nullptr;
    for (const auto& st : options_.strategies)
      if (st.id == s.strategy) found = &st;
    if (!found) throw BindingError({"strategy " + s.strategy});
    if (found->agent != s.agent)
      throw CheckError("strategy '" + s.strategy + "' belongs to agent '" + found->agent +
                       "', not '" + s.agent + "'");
    it = pruned_.emplace(s.strategy, std::make_shared<const Model>(apply_strategy(m_, *found)))
             .first;
  }
  Evaluator sub(*it->second, options_);
  sub.top_ = this;  // never the top formula
  return sub.eval(s.arg);
}

namespace {

std::optional<Witness> find_witness(Evaluator& ev, const Formula& f, StateId start) {
  const Model& m = ev.model();
  const Graph& g = m.graph();
  Witness w;
  const auto* q = f.as<node::PathQuantifier>();
  if (q && q->universal && q->body.kind == K::Finally) {
    // Stay outside the satisfaction set; every such state has a successor
    // that is also outside it.
    StateSet bad = ~ev.eval(f).upper;
    std::vector<std::int64_t> seen(m.num_states(), -1);
    StateId s = start;
    for (;;) {
      seen[s] = static_cast<std::int64_t>(w.path.size());
      w.path.push_back(s);
      std::optional<StateId> next;
      for (StateId t : g.successors(s))
        if (bad.contains(t)) {
          next = t;
          break;
        }
      if (!next) break;
      if (seen[*next] >= 0) {
        w.loop_start = static_cast<std::size_t>(seen[*next]);
        break;
      }
      s = *next;
    }
    w.note = "lasso avoiding " + print(q->body.arg);
    return w;
  }
  if (q && q->universal && q->body.kind == K::Globally) {
    StateSet bad = ~ev.eval(q->body.arg).upper;
    std::vector<std::int64_t> parent(m.num_states(), -2);
    std::deque<StateId> work{start};
    parent[start] = -1;
    while (!work.empty()) {
      StateId s = work.front();
      work.pop_front();
      if (bad.contains(s)) {
        for (std::int64_t x = s; x >= 0; x = parent[static_cast<std::size_t>(x)])
          w.path.push_back(static_cast<StateId>(x));
        std::reverse(w.path.begin(), w.path.end());
        w.note = "path to a state violating " + print(q->body.arg);
        return w;
      }
      for (StateId t : g.successors(s))
        if (parent[t] == -2) {
          parent[t] = s;
          work.push_back(t);
        }
    }
  }
  w.path.push_back(start);
  w.note = "initial state violates the formula";
  return w;
}

}  // namespace

Verdict evaluate_top(const Formula& f, const Model& m, const CheckOptions& options) {
  Evaluator ev(m, options);
  Sat s = ev.eval(f);
  const StateSet& reach = ev.reachable();
  Verdict v{f, nullptr, s.lower & reach, s.upper & reach, reach, false, Truth::False,
            ev.top_value, std::nullopt, ev.top_strategy};
  bool lower_all = true;
  std::optional<StateId> violated;
  for (StateId init : m.initial()) {
    if (!s.lower.contains(init)) lower_all = false;
    if (!s.upper.contains(init) && !violated) violated = init;
  }
  v.holds_initially = lower_all;
  v.truth = lower_all ? Truth::True : violated ? Truth::False : Truth::Unknown;
  if (violated) v.witness = find_witness(ev, f, *violated);
  return v;
}

}  // namespace detail

namespace {

void require_ctl(const Formula& f) {
  if (f.is<node::Coalition>())
    throw CheckError("coalition formulas need the strategic checker (atl_eval, "
                     "atl_eval_natural, prob_eval or evaluate): " + print(f));
  if (f.is<node::Suppose>())
    throw CheckError("supp needs the strategic checker (suppose_eval or evaluate): " + print(f));
  const auto& v = f.node().value;
  if (const auto* x = std::get_if<node::Not>(&v)) return require_ctl(x->arg);
  if (const auto* x = std::get_if<node::Binary>(&v)) {
    require_ctl(x->lhs);
    return require_ctl(x->rhs);
  }
  if (const auto* x = std::get_if<node::PathQuantifier>(&v)) {
    if (x->body.hold) require_ctl(*x->body.hold);
    return require_ctl(x->body.arg);
  }
  if (const auto* x = std::get_if<node::Knows>(&v)) return require_ctl(x->arg);
  if (const auto* x = std::get_if<node::Once>(&v)) return require_ctl(x->arg);
}

void collect_names(const Formula& f, const Model& m, const std::vector<Strategy>& strategies,
                   std::set<std::string>& out) {
  auto agent = [&](const std::string& a) {
    if (!m.find_agent(a)) out.insert("agent " + a);
  };
  auto body = [&](const PathBody& b) {
    if (b.hold) collect_names(*b.hold, m, strategies, out);
    collect_names(b.arg, m, strategies, out);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Atom>) {
          std::string name = atom_symbol(n);
          if (!m.find_atom(name)) out.insert("atom " + name);
        } else if constexpr (std::is_same_v<T, node::Compare>) {
          if (!m.find_feature(n.feature)) out.insert("feature " + n.feature);
        } else if constexpr (std::is_same_v<T, node::Not> || std::is_same_v<T, node::Once>) {
          collect_names(n.arg, m, strategies, out);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          collect_names(n.lhs, m, strategies, out);
          collect_names(n.rhs, m, strategies, out);
        } else if constexpr (std::is_same_v<T, node::PathQuantifier>) {
          body(n.body);
        } else if constexpr (std::is_same_v<T, node::Coalition>) {
          for (const auto& a : n.agents) agent(a);
          body(n.body);
        } else if constexpr (std::is_same_v<T, node::Knows> || std::is_same_v<T, node::Macro>) {
          agent(n.agent);
          collect_names(n.arg, m, strategies, out);
        } else if constexpr (std::is_same_v<T, node::Suppose>) {
          agent(n.agent);
          bool known = std::any_of(strategies.begin(), strategies.end(),
                                   [&](const Strategy& s) { return s.id == n.strategy; });
          if (!known) out.insert("strategy " + n.strategy);
          collect_names(n.arg, m, strategies, out);
        } else if constexpr (std::is_same_v<T, node::Quantifier>) {
          collect_names(n.body, m, strategies, out);
        }
      },
      f.node().value);
}

}  // namespace

Verdict eval(const Formula& f, const Model& m) {
  require_ctl(f);
  return detail::evaluate_top(f, m, CheckOptions{});
}

Verdict evaluate(const Formula& f, const Model& m, const CheckOptions& options) {
  return detail::evaluate_top(f, m, options);
}

std::vector<std::string> missing_names(const Formula& f, const Model& m,
                                       const std::vector<Strategy>& strategies) {
  std::set<std::string> out;
  collect_names(f, m, strategies, out);
  return {out.begin(), out.end()};
}

Formula expand(const Formula& f, const Model& m) {
  return expand_quantifiers(expand_macros(f), m.domains());
}

PreparedSpec prepare(const std::vector<Formula>& formulas, const Model& m) {
  PreparedSpec out;
  for (const auto& f : formulas)
    for (auto& op : collect_once(f))
      if (std::find(out.operands.begin(), out.operands.end(), op) == out.operands.end())
        out.operands.push_back(op);
  out.model = std::make_shared<const Model>(augment_monitors(m, out.operands));
  return out;
}

Verdict check_formula(const Formula& f, const Model& m, const CheckOptions& options) {
  Formula expanded = expand(f, m);
  if (auto missing = missing_names(expanded, m, options.strategies); !missing.empty())
    throw BindingError(std::move(missing));
  PreparedSpec prepared = prepare({expanded}, m);
  Verdict v = evaluate(compile_once(expanded, prepared.operands), *prepared.model, options);
  v.formula = f;
  v.model = prepared.model;
  return v;
}

RequirementResult check_requirement(const Requirement& r, const Model& m,
                                    const CheckOptions& options) {
  if (r.status == RequirementStatus::Informal || !r.formula) return InformalMarker{};
  return check_formula(*r.formula, m, options);
}

}  // namespace agentcheck
