#include "agentcheck/formula.hpp"

#include <charconv>
#include <sstream>

namespace agentcheck {

Formula::Formula(FormulaNode node)
    : node_(std::make_shared<const FormulaNode>(std::move(node))) {}

bool operator==(const Formula& a, const Formula& b) {
  return a.node_ == b.node_ || *a.node_ == *b.node_;
}

namespace {

Formula wrap(auto n) { return Formula(FormulaNode{std::move(n)}); }

}  // namespace

Formula make_true() { return wrap(node::Constant{true}); }
Formula make_false() { return wrap(node::Constant{false}); }
Formula make_atom(std::string name, std::vector<Term> args) {
  return wrap(node::Atom{std::move(name), std::move(args)});
}
Formula make_not(Formula f) { return wrap(node::Not{std::move(f)}); }
Formula make_and(Formula a, Formula b) {
  return wrap(node::Binary{BinaryOp::And, std::move(a), std::move(b)});
}
Formula make_or(Formula a, Formula b) {
  return wrap(node::Binary{BinaryOp::Or, std::move(a), std::move(b)});
}
Formula make_implies(Formula a, Formula b) {
  return wrap(node::Binary{BinaryOp::Implies, std::move(a), std::move(b)});
}
Formula make_all(PathBody body) {
  return wrap(node::PathQuantifier{true, std::move(body)});
}
Formula make_exists(PathBody body) {
  return wrap(node::PathQuantifier{false, std::move(body)});
}
Formula make_coalition(std::vector<std::string> agents, PathBody body,
                       std::optional<Bound> bound) {
  return wrap(node::Coalition{std::move(agents), bound, std::move(body)});
}
Formula make_knows(std::string agent, Formula f) {
  return wrap(node::Knows{std::move(agent), std::move(f)});
}
Formula make_once(Formula f) { return wrap(node::Once{std::move(f)}); }
Formula make_suppose(std::string agent, std::string strategy, Formula f) {
  return wrap(node::Suppose{std::move(agent), std::move(strategy), std::move(f)});
}
Formula make_forall(std::string var, std::int64_t lo, std::int64_t hi,
                    Formula body) {
  return wrap(node::Quantifier{true, std::move(var), lo, hi, {}, std::move(body)});
}
Formula make_exists_var(std::string var, std::int64_t lo, std::int64_t hi,
                        Formula body) {
  return wrap(
      node::Quantifier{false, std::move(var), lo, hi, {}, std::move(body)});
}
Formula make_compare(std::string feature, CmpOp op, Term rhs) {
  return wrap(node::Compare{std::move(feature), op, std::move(rhs)});
}
Formula make_macro(MacroKind kind, std::string agent, Formula f) {
  return wrap(node::Macro{kind, std::move(agent), std::move(f)});
}

PathBody next(Formula f) { return {PathBody::Kind::Next, std::move(f), {}, 0}; }
PathBody finally(Formula f) {
  return {PathBody::Kind::Finally, std::move(f), {}, 0};
}
PathBody globally(Formula f) {
  return {PathBody::Kind::Globally, std::move(f), {}, 0};
}
PathBody until(Formula hold, Formula goal) {
  return {PathBody::Kind::Until, std::move(goal), std::move(hold), 0};
}
PathBody finally_within(std::uint32_t steps, Formula f) {
  return {PathBody::Kind::BoundedFinally, std::move(f), {}, steps};
}
PathBody finally_globally(Formula f) {
  return {PathBody::Kind::FinallyGlobally, std::move(f), {}, 0};
}
PathBody globally_finally(Formula f) {
  return {PathBody::Kind::GloballyFinally, std::move(f), {}, 0};
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Less: return "<";
    case CmpOp::LessEq: return "<=";
    case CmpOp::Equal: return "=";
    case CmpOp::GreaterEq: return ">=";
    case CmpOp::Greater: return ">";
  }
  return "?";
}

bool compare(std::int64_t lhs, CmpOp op, std::int64_t rhs) {
  switch (op) {
    case CmpOp::Less: return lhs < rhs;
    case CmpOp::LessEq: return lhs <= rhs;
    case CmpOp::Equal: return lhs == rhs;
    case CmpOp::GreaterEq: return lhs >= rhs;
    case CmpOp::Greater: return lhs > rhs;
  }
  return false;
}

namespace {

std::string term_text(const Term& t) {
  if (const auto* i = std::get_if<std::int64_t>(&t)) return std::to_string(*i);
  return std::get<std::string>(t);
}

std::string decimal_text(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  // Keep a decimal point so the token reads as a decimal.
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string bound_text(const Bound& b) {
  if (const auto* p = std::get_if<ProbabilityBound>(&b))
    return "[P>=" + decimal_text(p->threshold) + "]";
  return "[compl<=" + std::to_string(std::get<ComplexityBound>(b).limit) + "]";
}

// Precedence levels: 0 implication, 1 disjunction, 2 conjunction, 3 unary.
class Printer {
 public:
  std::string formula(const Formula& f, int ctx) {
    return std::visit([&](const auto& n) { return render(n, ctx); },
                      f.node().value);
  }

  std::string body(const PathBody& b) {
    using K = PathBody::Kind;
    switch (b.kind) {
      case K::Next: return "X " + formula(b.arg, 3);
      case K::Finally: return "F " + formula(b.arg, 3);
      case K::Globally: return "G " + formula(b.arg, 3);
      case K::BoundedFinally:
        return "F<=" + std::to_string(b.steps) + " " + formula(b.arg, 3);
      case K::FinallyGlobally: return "F G " + formula(b.arg, 3);
      case K::GloballyFinally: return "G F " + formula(b.arg, 3);
      case K::Until:
        return "(" + formula(*b.hold, 3) + " U " + formula(b.arg, 3) + ")";
    }
    return {};
  }

 private:
  static std::string paren(std::string s, bool wrap) {
    return wrap ? "(" + s + ")" : s;
  }

  std::string render(const node::Constant& n, int) {
    return n.value ? "true" : "false";
  }

  std::string render(const node::Atom& n, int) {
    if (n.args.empty()) return n.name;
    std::string s = n.name + "(";
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i) s += ",";
      s += term_text(n.args[i]);
    }
    return s + ")";
  }

  std::string render(const node::Not& n, int) {
    return "!" + formula(n.arg, 3);
  }

  std::string render(const node::Binary& n, int ctx) {
    switch (n.op) {
      case BinaryOp::Implies:
        return paren(formula(n.lhs, 1) + " -> " + formula(n.rhs, 0), ctx > 0);
      case BinaryOp::Or:
        return paren(formula(n.lhs, 1) + " | " + formula(n.rhs, 2), ctx > 1);
      case BinaryOp::And:
        return paren(formula(n.lhs, 2) + " & " + formula(n.rhs, 3), ctx > 2);
    }
    return {};
  }

  std::string render(const node::PathQuantifier& n, int) {
    return std::string(n.universal ? "A " : "E ") + body(n.body);
  }

  std::string render(const node::Coalition& n, int) {
    std::string s = "<<";
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
      if (i) s += ",";
      s += n.agents[i];
    }
    s += ">>";
    if (n.bound) s += bound_text(*n.bound);
    return s + " " + body(n.body);
  }

  std::string render(const node::Knows& n, int) {
    return "K[" + n.agent + "] " + formula(n.arg, 3);
  }

  std::string render(const node::Once& n, int) {
    return "ONCE " + formula(n.arg, 3);
  }

  std::string render(const node::Suppose& n, int) {
    return "supp(" + n.agent + ": " + n.strategy + ") " + formula(n.arg, 3);
  }

  std::string render(const node::Quantifier& n, int ctx) {
    std::string range = n.domain.empty() ? std::to_string(n.lo) + ".." +
                                               std::to_string(n.hi)
                                         : n.domain;
    std::string s = std::string(n.universal ? "forall " : "exists ") + n.var +
                    " in " + range + " . " + formula(n.body, 0);
    return paren(std::move(s), ctx > 0);
  }

  std::string render(const node::Compare& n, int) {
    return n.feature + " " + std::string(to_string(n.op)) + " " +
           term_text(n.rhs);
  }

  std::string render(const node::Macro& n, int) {
    return std::string(n.kind == MacroKind::Diagnosability ? "DIAG(" : "RESIL(") +
           n.agent + ", " + formula(n.arg, 0) + ")";
  }
};

std::string_view body_name(PathBody::Kind k) {
  using K = PathBody::Kind;
  switch (k) {
    case K::Next: return "X";
    case K::Finally: return "F";
    case K::Globally: return "G";
    case K::Until: return "U";
    case K::BoundedFinally: return "BoundedF";
    case K::FinallyGlobally: return "FG";
    case K::GloballyFinally: return "GF";
  }
  return "?";
}

void dump(const Formula& f, std::ostringstream& out);

void dump(const PathBody& b, std::ostringstream& out) {
  out << '(' << body_name(b.kind);
  if (b.kind == PathBody::Kind::BoundedFinally) out << ' ' << b.steps;
  if (b.hold) {
    out << ' ';
    dump(*b.hold, out);
  }
  out << ' ';
  dump(b.arg, out);
  out << ')';
}

void dump(const Formula& f, std::ostringstream& out) {
  const auto& v = f.node().value;
  if (const auto* n = std::get_if<node::Constant>(&v)) {
    out << (n->value ? "(True)" : "(False)");
  } else if (const auto* n = std::get_if<node::Atom>(&v)) {
    out << "(Atom " << n->name;
    for (const auto& t : n->args) out << ' ' << term_text(t);
    out << ')';
  } else if (const auto* n = std::get_if<node::Not>(&v)) {
    out << "(Not ";
    dump(n->arg, out);
    out << ')';
  } else if (const auto* n = std::get_if<node::Binary>(&v)) {
    out << (n->op == BinaryOp::And ? "(And "
            : n->op == BinaryOp::Or ? "(Or "
                                    : "(Implies ");
    dump(n->lhs, out);
    out << ' ';
    dump(n->rhs, out);
    out << ')';
  } else if (const auto* n = std::get_if<node::PathQuantifier>(&v)) {
    out << (n->universal ? "(PathAll " : "(PathExists ");
    dump(n->body, out);
    out << ')';
  } else if (const auto* n = std::get_if<node::Coalition>(&v)) {
    out << "(Coalition (";
    for (std::size_t i = 0; i < n->agents.size(); ++i)
      out << (i ? " " : "") << n->agents[i];
    out << ')';
    if (n->bound) {
      if (const auto* p = std::get_if<ProbabilityBound>(&*n->bound))
        out << " (Probability " << decimal_text(p->threshold) << ')';
      else
        out << " (Complexity " << std::get<ComplexityBound>(*n->bound).limit
            << ')';
    }
    out << ' ';
    dump(n->body, out);
    out << ')';
  } else if (const auto* n = std::get_if<node::Knows>(&v)) {
    out << "(Knows " << n->agent << ' ';
    dump(n->arg, out);
    out << ')';
  } else if (const auto* n = std::get_if<node::Once>(&v)) {
    out << "(Once ";
    dump(n->arg, out);
    out << ')';
  } else if (const auto* n = std::get_if<node::Suppose>(&v)) {
    out << "(Suppose " << n->agent << ' ' << n->strategy << ' ';
    dump(n->arg, out);
    out << ')';
  } else if (const auto* n = std::get_if<node::Quantifier>(&v)) {
    out << (n->universal ? "(ForAll " : "(Exists ") << n->var << ' ';
    if (n->domain.empty())
      out << n->lo << ".." << n->hi;
    else
      out << n->domain;
    out << ' ';
    dump(n->body, out);
    out << ')';
  } else if (const auto* n = std::get_if<node::Compare>(&v)) {
    out << "(FeatureCmp " << n->feature << ' ' << to_string(n->op) << ' '
        << term_text(n->rhs) << ')';
  } else if (const auto* n = std::get_if<node::Macro>(&v)) {
    out << (n->kind == MacroKind::Diagnosability ? "(Diag " : "(Resil ")
        << n->agent << ' ';
    dump(n->arg, out);
    out << ')';
  }
}

std::size_t count(const PathBody& b);

std::size_t count_nodes(const Formula& f) {
  return 1 + std::visit(
                 [](const auto& n) -> std::size_t {
                   using T = std::decay_t<decltype(n)>;
                   if constexpr (std::is_same_v<T, node::Not> ||
                                 std::is_same_v<T, node::Knows> ||
                                 std::is_same_v<T, node::Once> ||
                                 std::is_same_v<T, node::Suppose> ||
                                 std::is_same_v<T, node::Macro>) {
                     return count_nodes(n.arg);
                   } else if constexpr (std::is_same_v<T, node::Binary>) {
                     return count_nodes(n.lhs) + count_nodes(n.rhs);
                   } else if constexpr (std::is_same_v<T, node::PathQuantifier> ||
                                        std::is_same_v<T, node::Coalition>) {
                     return count(n.body);
                   } else if constexpr (std::is_same_v<T, node::Quantifier>) {
                     return count_nodes(n.body);
                   } else {
                     return 0;
                   }
                 },
                 f.node().value);
}

std::size_t count(const PathBody& b) {
  return count_nodes(b.arg) + (b.hold ? count_nodes(*b.hold) : 0);
}

}  // namespace

std::string print(const Formula& f) { return Printer{}.formula(f, 0); }
std::string print(const PathBody& body) { return Printer{}.body(body); }

std::string dump_ast(const Formula& f) {
  std::ostringstream out;
  dump(f, out);
  return out.str();
}

std::string atom_symbol(const node::Atom& atom) {
  std::string s = atom.name;
  for (const auto& t : atom.args) s += "_" + term_text(t);
  return s;
}

std::size_t node_count(const Formula& f) { return count_nodes(f); }

bool is_state_predicate(const Formula& f) {
  const auto& v = f.node().value;
  if (std::holds_alternative<node::Constant>(v) ||
      std::holds_alternative<node::Atom>(v) ||
      std::holds_alternative<node::Compare>(v))
    return true;
  if (const auto* n = std::get_if<node::Not>(&v)) return is_state_predicate(n->arg);
  if (const auto* n = std::get_if<node::Binary>(&v))
    return is_state_predicate(n->lhs) && is_state_predicate(n->rhs);
  return false;
}

}  // namespace agentcheck
