// Concrete syntax for formulas and requirement spec files.
//
//   formula := impl ;  impl := or ("->" impl)? ;  or := and ("|" and)* ;
//   and := un ("&" un)* ;
//   un := "!" un | "A" path | "E" path | "<<" ids ">>" bound? path
//       | "K[" id "]" un | "ONCE" un | "supp(" id ":" id ")" un
//       | ("forall"|"exists") id "in" (int ".." int | id) "." formula
//       | "DIAG(" id "," formula ")" | "RESIL(" id "," formula ")"
//       | id cmpop (int | id) | id ("(" term ("," term)* ")")?
//       | "true" | "false" | "(" formula ")" ;
//   path := "X" un | "F" ("<=" int)? un | "G" ("F" un | un) | "F" "G" un
//         | un "U" un | "(" path ")" ;
//   bound := "[P>=" decimal "]" | "[compl<=" int "]" ;
//
// A quantifier body extends as far to the right as possible.
//
// Spec files hold a sequence of blocks
//
//   requirement <ID> "<text>":
//     <formula | informal>
//
// with `#` starting a comment that runs to end of line.

#ifndef AGENTCHECK_PARSER_HPP
#define AGENTCHECK_PARSER_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "agentcheck/formula.hpp"

namespace agentcheck {

struct SourcePos {
  int line = 1;
  int column = 1;
};

struct Diagnostic {
  enum class Kind { Syntax, Semantic };
  Kind kind;
  SourcePos pos;
  std::string message;
};

std::string to_string(const Diagnostic& d);

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(Diagnostic d)
      : std::runtime_error(to_string(d)), diagnostic_(std::move(d)) {}
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

enum class RequirementStatus { Formalized, Informal };

struct Requirement {
  std::string id;
  std::string text;
  RequirementStatus status = RequirementStatus::Informal;
  std::optional<Formula> formula;  // present iff status == Formalized
  std::string note;
  SourcePos pos;
};

struct SpecParseResult {
  std::vector<Requirement> requirements;
  std::vector<Diagnostic> errors;

  bool ok() const { return errors.empty(); }
};

/// Parses a single formula; throws ParseError on syntax or invariant errors.
Formula parse_formula(std::string_view source);

/// Parses a spec file. Errors in one block do not stop the others from
/// being parsed; every problem is reported with its position.
SpecParseResult parse_spec(std::string_view source);

/// Renders requirements back into spec-file text. Informal entries and
/// notes are preceded by `# status:` / `# note:` comment lines.
std::string print_spec(const std::vector<Requirement>& requirements);

}  // namespace agentcheck

#endif  // AGENTCHECK_PARSER_HPP
