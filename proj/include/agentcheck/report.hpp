// Batch checking of requirement lists and report serialisation.

#ifndef AGENTCHECK_REPORT_HPP
#define AGENTCHECK_REPORT_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "agentcheck/model.hpp"
#include "agentcheck/parser.hpp"
#include "agentcheck/verdict.hpp"

namespace agentcheck {

struct ReportRow {
  std::string id;
  RequirementStatus status = RequirementStatus::Informal;
  std::string verdict;  // true, false, unknown-within-budget or informal
  std::optional<double> value;
  std::string witness;  // empty when there is none
  std::string strategy;
};

struct Report {
  std::size_t states = 0, transitions = 0, initial = 0;
  CheckOptions options;
  std::vector<ReportRow> rows;
};

/// Errors tied to one requirement of the input; the message carries the
/// requirement's position.
class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expands every formalized requirement, binds it against `m`, augments the
/// model once with the monitors of all ONCE operands and checks each formula.
Report run_check(const Model& m, const std::vector<Requirement>& requirements,
                 const CheckOptions& options = {}, std::string_view spec_name = "spec");

/// 0 when every formalized requirement is true, 1 otherwise.
int exit_code(const Report& r);

std::string format_text(const Report& r);
std::string format_json(const Report& r);

/// Rows are candidates, columns requirement ids, cells values in [0, 1].
struct ScoreTable {
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> scores;
};

class ScoreTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON form: {"columns": [...], "rows": [{"id": "...", "scores": [...]}]}.
ScoreTable load_score_table(std::string_view json_text);

/// Indices of the non-dominated rows, in input order. Throws
/// ScoreTableError on a ragged table or a value outside [0, 1].
std::vector<std::size_t> pareto_frontier(const ScoreTable& t);

}  // namespace agentcheck

#endif  // AGENTCHECK_REPORT_HPP
