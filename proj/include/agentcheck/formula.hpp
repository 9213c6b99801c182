// Abstract syntax of the multi-agent requirement logic.
//
// A Formula is an immutable, cheaply copyable handle onto a shared node.
// Equality is structural: two formulas compare equal iff their trees match,
// independent of whether they share storage.
//
// State-formula constructs:
//   true / false / atom / atom(args)      propositions (args ground to atom_1_2)
//   ! & | ->                              boolean connectives
//   A body, E body                        path quantifiers
//   <<agents>>[bound] body                coalition (strategic) operator
//   K[a] f                                observational knowledge
//   ONCE f                                past-time "sometime in the past"
//   supp(a: s) f                          model update by a named strategy
//   forall/exists v in lo..hi . f         finite integer quantifiers
//   feature op rhs                        numeric feature comparison
//   DIAG(a, f), RESIL(a, f)               diagnosability / resilience macros
//
// Path bodies are restricted to X, F, G, U, F<=k, F G and G F over state
// formulas.

#ifndef AGENTCHECK_FORMULA_HPP
#define AGENTCHECK_FORMULA_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace agentcheck {

struct FormulaNode;

class Formula {
 public:
  explicit Formula(FormulaNode node);

  const FormulaNode& node() const { return *node_; }

  template <class T>
  const T* as() const;

  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  /// Identity of the shared node; stable for the lifetime of any copy.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  std::shared_ptr<const FormulaNode> node_;
};

/// Thrown when a formula violates a structural invariant.
class FormulaError : public std::runtime_error {
 public:
  explicit FormulaError(const std::string& what, const void* node = nullptr)
      : std::runtime_error(what), node_(node) {}

  /// Formula::id() of the offending subformula, when known.
  const void* node() const { return node_; }

 private:
  const void* node_;
};

enum class CmpOp { Less, LessEq, Equal, GreaterEq, Greater };
enum class BinaryOp { And, Or, Implies };
enum class MacroKind { Diagnosability, Resilience };

/// Integer literal or identifier (a bound variable, or a literal symbol in
/// atom arguments).
using Term = std::variant<std::int64_t, std::string>;

struct PathBody {
  enum class Kind {
    Next,
    Finally,
    Globally,
    Until,
    BoundedFinally,
    FinallyGlobally,
    GloballyFinally
  };

  Kind kind;
  Formula arg;                  // Until: right operand.
  std::optional<Formula> hold;  // Until only: left operand.
  std::uint32_t steps = 0;      // BoundedFinally only.

  bool operator==(const PathBody&) const = default;
};

struct ProbabilityBound {
  double threshold;
  bool operator==(const ProbabilityBound&) const = default;
};

struct ComplexityBound {
  std::uint32_t limit;
  bool operator==(const ComplexityBound&) const = default;
};

using Bound = std::variant<ProbabilityBound, ComplexityBound>;

namespace node {

struct Constant {
  bool value;
  bool operator==(const Constant&) const = default;
};

struct Atom {
  std::string name;
  std::vector<Term> args;
  bool operator==(const Atom&) const = default;
};

struct Not {
  Formula arg;
  bool operator==(const Not&) const = default;
};

struct Binary {
  BinaryOp op;
  Formula lhs;
  Formula rhs;
  bool operator==(const Binary&) const = default;
};

struct PathQuantifier {
  bool universal;
  PathBody body;
  bool operator==(const PathQuantifier&) const = default;
};

struct Coalition {
  std::vector<std::string> agents;
  std::optional<Bound> bound;
  PathBody body;
  bool operator==(const Coalition&) const = default;
};

struct Knows {
  std::string agent;
  Formula arg;
  bool operator==(const Knows&) const = default;
};

struct Once {
  Formula arg;
  bool operator==(const Once&) const = default;
};

struct Suppose {
  std::string agent;
  std::string strategy;
  Formula arg;
  bool operator==(const Suppose&) const = default;
};

/// `forall var in lo..hi . body` (or `in feature` when domain is set).
struct Quantifier {
  bool universal;
  std::string var;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::string domain;  // non-empty: range is the declared domain of a feature
  Formula body;
  bool operator==(const Quantifier&) const = default;
};

struct Compare {
  std::string feature;
  CmpOp op;
  Term rhs;
  bool operator==(const Compare&) const = default;
};

struct Macro {
  MacroKind kind;
  std::string agent;
  Formula arg;
  bool operator==(const Macro&) const = default;
};

}  // namespace node

struct FormulaNode {
  std::variant<node::Constant, node::Atom, node::Not, node::Binary,
               node::PathQuantifier, node::Coalition, node::Knows, node::Once,
               node::Suppose, node::Quantifier, node::Compare, node::Macro>
      value;

  bool operator==(const FormulaNode&) const = default;
};

template <class T>
const T* Formula::as() const {
  return std::get_if<T>(&node_->value);
}

// Constructors.
Formula make_true();
Formula make_false();
Formula make_atom(std::string name, std::vector<Term> args = {});
Formula make_not(Formula f);
Formula make_and(Formula a, Formula b);
Formula make_or(Formula a, Formula b);
Formula make_implies(Formula a, Formula b);
Formula make_all(PathBody body);
Formula make_exists(PathBody body);
Formula make_coalition(std::vector<std::string> agents, PathBody body,
                       std::optional<Bound> bound = std::nullopt);
Formula make_knows(std::string agent, Formula f);
Formula make_once(Formula f);
Formula make_suppose(std::string agent, std::string strategy, Formula f);
Formula make_forall(std::string var, std::int64_t lo, std::int64_t hi,
                    Formula body);
Formula make_exists_var(std::string var, std::int64_t lo, std::int64_t hi,
                        Formula body);
Formula make_compare(std::string feature, CmpOp op, Term rhs);
Formula make_macro(MacroKind kind, std::string agent, Formula f);

PathBody next(Formula f);
PathBody finally(Formula f);
PathBody globally(Formula f);
PathBody until(Formula hold, Formula goal);
PathBody finally_within(std::uint32_t steps, Formula f);
PathBody finally_globally(Formula f);
PathBody globally_finally(Formula f);

/// Concrete-syntax rendering; parse_formula(print(f)) == f.
std::string print(const Formula& f);
std::string print(const PathBody& body);

/// S-expression dump of the tree, one construct per parenthesised group.
std::string dump_ast(const Formula& f);

/// Name the model uses for an atom: `p`, or `p_1_a` for `p(1,a)`.
/// Identifier arguments left after quantifier expansion are literal symbols.
std::string atom_symbol(const node::Atom& atom);

std::string_view to_string(CmpOp op);
bool compare(std::int64_t lhs, CmpOp op, std::int64_t rhs);

/// Number of nodes in the tree (path bodies count their operands only).
std::size_t node_count(const Formula& f);

/// True for formulas built only from constants, atoms, comparisons and
/// boolean connectives.
bool is_state_predicate(const Formula& f);

}  // namespace agentcheck

#endif  // AGENTCHECK_FORMULA_HPP
