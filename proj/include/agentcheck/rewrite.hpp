// Formula-to-formula transformations: invariant checking, macro and
// quantifier expansion, and compilation of ONCE into monitor atoms.

#ifndef AGENTCHECK_REWRITE_HPP
#define AGENTCHECK_REWRITE_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "agentcheck/formula.hpp"

namespace agentcheck {

/// Feature name -> largest value of its domain [0..max].
using FeatureDomains = std::map<std::string, std::int64_t>;

/// Throws FormulaError (with the offending node) if an invariant fails:
/// ONCE over a non-predicate, a misplaced bound, an out-of-range
/// probability, an empty quantifier range, or an undeclared variable.
void validate(const Formula& f);

/// DIAG(a, p)  => A G (!p -> <<a>> F K[a] !p)
/// RESIL(a, p) => A G (!p -> <<a>> F p)
Formula expand_macros(const Formula& f);

bool contains_macros(const Formula& f);

/// Replaces every quantifier with the finite conjunction (forall) or
/// disjunction (exists) of its instances, substituting the bound value into
/// comparisons and atom arguments. Named ranges resolve through `domains`.
Formula expand_quantifiers(const Formula& f, const FeatureDomains& domains = {});

/// Distinct ONCE operands in first-occurrence (pre-order, left to right)
/// order.
std::vector<Formula> collect_once(const Formula& f);

/// Name of the monitor atom recording the operand at `index`.
std::string monitor_atom(std::size_t index);

/// Rewrites ONCE(op) to the monitor atom of op's position in `operands`.
/// Throws FormulaError if an operand is missing from the list.
Formula compile_once(const Formula& f, std::span<const Formula> operands);

}  // namespace agentcheck

#endif  // AGENTCHECK_REWRITE_HPP
