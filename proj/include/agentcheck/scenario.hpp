// Parameterised epidemic-mitigation models and the requirement catalog.
//
// Agents: the health authority `a`, citizens `1`..`n`, and `env`, which
// decides who meets whom. Each citizen moves through S -> E -> I1 -> I2 ->
// I3 -> R; a susceptible citizen becomes exposed when env picks a contact
// with an infectious one, and the later stages advance deterministically.
//
// The authority learns that citizen i was exposed (flag known_i, atom
// access_a_i) when testing is on, i runs the app, and either i turns
// infectious or i was exposed by a contact with another app user. It may
// then notify i, which succeeds with the configured reliability; a notified
// citizen may quarantine, after which it makes no contacts.
//
// Observations: the authority sees its known/notified flags and, with
// testing on, the number of infectious citizens; citizen i sees whether it
// was notified and whether it is quarantined; env sees the whole state.

#ifndef AGENTCHECK_SCENARIO_HPP
#define AGENTCHECK_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "agentcheck/model.hpp"
#include "agentcheck/parser.hpp"

namespace agentcheck {

enum class ContactGraph { Complete, Ring, Explicit };

struct ScenarioParams {
  int citizens = 2;                      // 1..4
  std::vector<bool> adoption;            // empty: everybody uses the app
  ContactGraph contacts = ContactGraph::Complete;
  std::vector<std::pair<int, int>> edges;  // Explicit only; citizens are 1-based
  bool testing = true;
  double notify_reliability = 1.0;
  /// Possible index cases, one initial state each; nullopt means every
  /// citizen, an empty list a single infection-free initial state.
  std::optional<std::vector<int>> initial_exposed;
  std::size_t max_states = 200000;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioModel {
  Model model;
  /// `notify_all` (notify the lowest known, unnotified citizen) and `idle`.
  std::vector<Strategy> strategies;
  /// Atom name -> meaning.
  std::map<std::string, std::string> atoms;
};

ScenarioModel generate(const ScenarioParams& params);

/// Requirement catalog; formalized entries are written for the default
/// two-citizen scenario.
std::vector<Requirement> catalog();

/// Catalog in spec-file form, with `# status:` lines on informal entries.
std::string catalog_text();

}  // namespace agentcheck

#endif  // AGENTCHECK_SCENARIO_HPP
