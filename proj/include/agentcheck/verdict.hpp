// Results and options shared by the checkers.

#ifndef AGENTCHECK_VERDICT_HPP
#define AGENTCHECK_VERDICT_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "agentcheck/formula.hpp"
#include "agentcheck/model.hpp"
#include "agentcheck/state_set.hpp"

namespace agentcheck {

/// IR: memoryless perfect-information strategies (fixpoints).
/// Uniform ("ir"): memoryless strategies that choose the same action in
/// states with equal local token (objective semantics, enumeration).
enum class CheckMode { PerfectInformation, Uniform };

std::string_view to_string(CheckMode mode);
/// Accepts "IR" and "ir".
std::optional<CheckMode> parse_check_mode(std::string_view text);

struct CheckOptions {
  CheckMode mode = CheckMode::PerfectInformation;
  double eps = 1e-8;           // value-iteration convergence
  double eps_compare = 1e-9;   // slack when comparing against P>=p
  std::size_t max_iter = 100000;

  /// Uniform strategies tried per coalition operator before giving up.
  std::size_t max_uniform_strategies = 1u << 20;

  /// Natural strategies: literals per guard and rules per strategy.
  /// Zero derives the budget from the complexity bound c (c-1 literals,
  /// c rules), which admits every strategy of complexity <= c.
  std::uint32_t guard_literals = 0;
  std::uint32_t rules = 0;
  /// Rule lists explored before the enumeration counts as exhausted.
  std::size_t max_natural_candidates = 1u << 20;

  std::vector<Strategy> strategies;  // table for supp(a: s)
};

/// `Unknown` is the unknown-within-budget verdict of bounded enumeration.
enum class Truth { True, False, Unknown };

std::string_view to_string(Truth t);

/// A finite path, optionally closing into a cycle at `loop_start`.
struct Witness {
  std::vector<StateId> path;
  std::optional<std::size_t> loop_start;
  std::string note;
};

struct Verdict {
  Formula formula;
  /// Model the state sets refer to: the monitor-augmented model built by
  /// check_formula; null from evaluate(), whose sets refer to its argument.
  std::shared_ptr<const Model> model;
  StateSet sat;        // reachable states known to satisfy the formula
  StateSet possible;   // reachable states not known to violate it
  StateSet evaluated;  // reachable states; the rest are unevaluated
  bool holds_initially = false;
  Truth truth = Truth::False;
  std::optional<double> value;  // probability bound: min over initial states
  std::optional<Witness> witness;
  std::string strategy;  // winning strategy of a top-level coalition
};

/// Thrown for constructs a checker entry point does not handle, and for
/// unsupported path bodies under a bound or coalition.
class CheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A formula names atoms, agents, features or strategies the model lacks.
class BindingError : public CheckError {
 public:
  explicit BindingError(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

/// Value iteration did not reach the requested precision.
class ConvergenceError : public CheckError {
 public:
  ConvergenceError(double residual, std::size_t iterations);
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace agentcheck

#endif  // AGENTCHECK_VERDICT_HPP
