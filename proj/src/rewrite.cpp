#include "agentcheck/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace agentcheck {

namespace {

using ChildFn = std::function<Formula(const Formula&)>;

PathBody map_body(const PathBody& b, const ChildFn& fn) {
  PathBody out = b;
  out.arg = fn(b.arg);
  if (b.hold) out.hold = fn(*b.hold);
  return out;
}

// Rebuilds `f` with `fn` applied to each direct child formula.
Formula map_children(const Formula& f, const ChildFn& fn) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        T copy = n;
        if constexpr (std::is_same_v<T, node::Not> ||
                      std::is_same_v<T, node::Knows> ||
                      std::is_same_v<T, node::Once> ||
                      std::is_same_v<T, node::Suppose> ||
                      std::is_same_v<T, node::Macro>) {
          copy.arg = fn(n.arg);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          copy.lhs = fn(n.lhs);
          copy.rhs = fn(n.rhs);
        } else if constexpr (std::is_same_v<T, node::PathQuantifier> ||
                             std::is_same_v<T, node::Coalition>) {
          copy.body = map_body(n.body, fn);
        } else if constexpr (std::is_same_v<T, node::Quantifier>) {
          copy.body = fn(n.body);
        } else {
          return f;
        }
        return Formula(FormulaNode{std::move(copy)});
      },
      f.node().value);
}

void for_each_child(const Formula& f, const std::function<void(const Formula&)>& fn) {
  map_children(f, [&](const Formula& c) {
    fn(c);
    return c;
  });
}

void check(const Formula& f, std::vector<std::string>& scope) {
  const auto& v = f.node().value;
  if (const auto* n = std::get_if<node::Once>(&v)) {
    if (!is_state_predicate(n->arg))
      throw FormulaError(
          "ONCE operand must be a boolean state predicate (atoms, comparisons "
          "and connectives only): " + print(n->arg),
          f.id());
  } else if (const auto* n = std::get_if<node::Coalition>(&v)) {
    using K = PathBody::Kind;
    if (n->bound) {
      if (const auto* p = std::get_if<ProbabilityBound>(&*n->bound)) {
        if (!(p->threshold >= 0.0 && p->threshold <= 1.0))
          throw FormulaError("probability bound must lie in [0,1]", f.id());
        if (n->body.kind != K::Finally && n->body.kind != K::BoundedFinally)
          throw FormulaError(
              "a probability bound requires an F or F<=k path body", f.id());
      } else {
        if (n->agents.size() != 1)
          throw FormulaError(
              "a complexity bound requires a single-agent coalition", f.id());
        if (n->body.kind != K::Finally && n->body.kind != K::Globally &&
            n->body.kind != K::BoundedFinally)
          throw FormulaError(
              "a complexity bound requires an F, G or F<=k path body", f.id());
      }
    }
  } else if (const auto* n = std::get_if<node::Quantifier>(&v)) {
    if (n->domain.empty() && n->lo > n->hi)
      throw FormulaError("empty quantifier range " + std::to_string(n->lo) +
                             ".." + std::to_string(n->hi),
                         f.id());
    scope.push_back(n->var);
    check(n->body, scope);
    scope.pop_back();
    return;
  } else if (const auto* n = std::get_if<node::Compare>(&v)) {
    if (const auto* var = std::get_if<std::string>(&n->rhs);
        var && std::find(scope.begin(), scope.end(), *var) == scope.end())
      throw FormulaError("undeclared variable '" + *var + "'", f.id());
  }
  for_each_child(f, [&](const Formula& c) { check(c, scope); });
}

struct Substitution {
  std::string var;
  std::int64_t value;
};

Formula substitute(const Formula& f, const Substitution& s) {
  const auto& v = f.node().value;
  if (const auto* n = std::get_if<node::Quantifier>(&v)) {
    if (n->var == s.var) return f;  // shadowed
  }
  if (const auto* n = std::get_if<node::Compare>(&v)) {
    if (const auto* var = std::get_if<std::string>(&n->rhs); var && *var == s.var)
      return make_compare(n->feature, n->op, s.value);
    return f;
  }
  if (const auto* n = std::get_if<node::Atom>(&v)) {
    bool changed = false;
    std::vector<Term> args = n->args;
    for (auto& t : args) {
      if (const auto* var = std::get_if<std::string>(&t); var && *var == s.var) {
        t = s.value;
        changed = true;
      }
    }
    return changed ? make_atom(n->name, std::move(args)) : f;
  }
  Formula g = map_children(f, [&](const Formula& c) { return substitute(c, s); });
  // Agent positions may name the variable too, as in K[j].
  const std::string value = std::to_string(s.value);
  if (const auto* n = g.as<node::Knows>(); n && n->agent == s.var)
    return make_knows(value, n->arg);
  if (const auto* n = g.as<node::Suppose>(); n && n->agent == s.var)
    return make_suppose(value, n->strategy, n->arg);
  if (const auto* n = g.as<node::Macro>(); n && n->agent == s.var)
    return make_macro(n->kind, value, n->arg);
  if (const auto* n = g.as<node::Coalition>();
      n && std::find(n->agents.begin(), n->agents.end(), s.var) != n->agents.end()) {
    std::vector<std::string> agents = n->agents;
    std::replace(agents.begin(), agents.end(), s.var, value);
    return make_coalition(std::move(agents), n->body, n->bound);
  }
  return g;
}

}  // namespace

void validate(const Formula& f) {
  std::vector<std::string> scope;
  check(f, scope);
}

Formula expand_macros(const Formula& f) {
  Formula inner = map_children(f, [](const Formula& c) { return expand_macros(c); });
  const auto* m = inner.as<node::Macro>();
  if (!m) return inner;
  Formula violated = make_not(m->arg);
  Formula response =
      m->kind == MacroKind::Diagnosability
          ? make_coalition({m->agent}, finally(make_knows(m->agent, violated)))
          : make_coalition({m->agent}, finally(m->arg));
  return make_all(globally(make_implies(violated, response)));
}

bool contains_macros(const Formula& f) {
  if (f.is<node::Macro>()) return true;
  bool found = false;
  for_each_child(f, [&](const Formula& c) { found = found || contains_macros(c); });
  return found;
}

Formula expand_quantifiers(const Formula& f, const FeatureDomains& domains) {
  Formula inner = map_children(
      f, [&](const Formula& c) { return expand_quantifiers(c, domains); });
  const auto* q = inner.as<node::Quantifier>();
  if (!q) return inner;
  std::int64_t lo = q->lo, hi = q->hi;
  if (!q->domain.empty()) {
    auto it = domains.find(q->domain);
    if (it == domains.end())
      throw FormulaError("quantifier over undeclared domain '" + q->domain + "'",
                         f.id());
    lo = 0;
    hi = it->second;
  }
  if (lo > hi)
    throw FormulaError("empty quantifier range " + std::to_string(lo) + ".." +
                           std::to_string(hi),
                       f.id());
  std::optional<Formula> acc;
  for (std::int64_t value = lo; value <= hi; ++value) {
    Formula instance = substitute(q->body, {q->var, value});
    acc = !acc ? instance
               : (q->universal ? make_and(*acc, instance) : make_or(*acc, instance));
  }
  return *acc;
}

std::vector<Formula> collect_once(const Formula& f) {
  std::vector<Formula> out;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (const auto* n = g.as<node::Once>()) {
      if (std::find(out.begin(), out.end(), n->arg) == out.end())
        out.push_back(n->arg);
      return;
    }
    for_each_child(g, walk);
  };
  walk(f);
  return out;
}

std::string monitor_atom(std::size_t index) {
  return "__once_" + std::to_string(index);
}

Formula compile_once(const Formula& f, std::span<const Formula> operands) {
  if (const auto* n = f.as<node::Once>()) {
    auto it = std::find(operands.begin(), operands.end(), n->arg);
    if (it == operands.end())
      throw FormulaError("ONCE operand has no monitor: " + print(n->arg), f.id());
    return make_atom(monitor_atom(static_cast<std::size_t>(it - operands.begin())));
  }
  return map_children(f, [&](const Formula& c) { return compile_once(c, operands); });
}

}  // namespace agentcheck
