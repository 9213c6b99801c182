#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "agentcheck/checker.hpp"
#include "agentcheck/parser.hpp"
#include "agentcheck/scenario.hpp"

namespace agentcheck {
namespace {

bool holds(const std::string& text, const Model& m, const CheckOptions& o = {}) {
  return check_formula(parse_formula(text), m, o).truth == Truth::True;
}

ScenarioParams params(int n, bool adopt, bool testing) {
  ScenarioParams p;
  p.citizens = n;
  p.adoption.assign(static_cast<std::size_t>(n), adopt);
  p.testing = testing;
  return p;
}

Formula catalog_formula(const std::string& id) {
  for (const auto& r : catalog())
    if (r.id == id) return *r.formula;
  ADD_FAILURE() << "no catalog entry " << id;
  return make_false();
}

TEST(Generate, NoIndexCaseMeansNoInfection) {
  ScenarioParams p;
  p.citizens = 1;
  p.initial_exposed = std::vector<int>{};
  ScenarioModel sm = generate(p);
  EXPECT_EQ(sm.model.initial().size(), 1u);
  EXPECT_TRUE(holds("A G !infected_1", sm.model));
  EXPECT_TRUE(holds("A G control_pandemic", sm.model));
}

TEST(Generate, IdentificationNeedsAdoption) {
  const char* identify = "exposed_1 -> A F K[a] ONCE exposed_1";
  EXPECT_TRUE(holds(identify, generate(params(2, true, true)).model));
  EXPECT_FALSE(holds(identify, generate(params(2, false, true)).model));
  EXPECT_FALSE(holds(identify, generate(params(2, true, false)).model));
}

TEST(Generate, AccessRequiresTestingAndAdoption) {
  EXPECT_TRUE(holds("A G !access_a_1", generate(params(2, false, true)).model));
  EXPECT_TRUE(holds("A G !access_a_1", generate(params(2, true, false)).model));
  EXPECT_TRUE(holds("E F access_a_1", generate(params(2, true, true)).model));
}

// Enabled actions depend only on the acting agent's local token.
void expect_uniform(const Model& m) {
  for (AgentId a = 0; a < m.num_agents(); ++a) {
    std::vector<std::optional<std::set<ActionId>>> by_token(m.num_tokens(a));
    for (StateId s = 0; s < m.num_states(); ++s) {
      std::set<ActionId> enabled;
      auto [lo, hi] = m.transitions(s);
      for (auto t = lo; t < hi; ++t) enabled.insert(m.joint(t)[a]);
      auto& slot = by_token[m.local(s, a)];
      if (!slot)
        slot = enabled;
      else
        ASSERT_EQ(*slot, enabled) << m.agents()[a] << " at " << m.state_name(s);
    }
  }
}

TEST(Generate, ValidityMatrix) {
  for (int n = 1; n <= 3; ++n)
    for (int adoption = 0; adoption < 3; ++adoption)
      for (bool testing : {true, false}) {
        ScenarioParams p = params(n, adoption != 0, testing);
        if (adoption == 2) p.adoption[0] = false;  // mixed
        ScenarioModel sm = generate(p);
        const Model& m = sm.model;
        ASSERT_EQ(m.num_agents(), static_cast<std::size_t>(n) + 2);
        EXPECT_EQ(m.agents().front(), "a");
        EXPECT_EQ(m.agents().back(), "env");
        EXPECT_EQ(reachable(m).count(), m.num_states());
        for (int i = 1; i <= n; ++i)
          for (const std::string atom : {"exposed_", "infected_", "notified_", "quarantined_",
                                         "access_a_"})
            EXPECT_TRUE(m.find_atom(atom + std::to_string(i))) << atom << i;
        expect_uniform(m);
        // The JSON form loads back into the same model.
        EXPECT_EQ(to_json(load_model(to_json(m))), to_json(m));
        EXPECT_NO_THROW(apply_strategy(m, sm.strategies[0]));
        EXPECT_NO_THROW(apply_strategy(m, sm.strategies[1]));
      }
}

TEST(Generate, DerivedAtoms) {
  for (int n = 1; n <= 3; ++n) {
    Model m = generate(params(n, true, true)).model;
    EXPECT_TRUE(holds("A G ((outbreak -> num_infected >= 2) & (num_infected >= 2 -> outbreak))", m));
    EXPECT_TRUE(holds("A G ((control_pandemic -> num_infected = 0) & "
                      "(num_infected = 0 -> control_pandemic))",
                      m));
    EXPECT_TRUE(holds("A G num_infected <= " + std::to_string(n), m));
  }
}

TEST(Generate, InfectionHasAnExposedPast) {
  for (int n = 1; n <= 3; ++n) {
    Model m = generate(params(n, n != 2, true)).model;
    for (int i = 1; i <= n; ++i) {
      const std::string k = std::to_string(i);
      EXPECT_TRUE(holds("A G (infected_" + k + " -> ONCE exposed_" + k + ")", m)) << i;
      EXPECT_TRUE(holds("A G (notified_" + k + " -> ONCE exposed_" + k + ")", m)) << i;
    }
  }
}

TEST(Generate, ProbabilitiesOnlyBelowFullReliability) {
  ScenarioParams p;
  EXPECT_FALSE(generate(p).model.probabilistic());
  p.notify_reliability = 0.95;
  EXPECT_TRUE(generate(p).model.probabilistic());
  p.notify_reliability = 0.0;
  Model never = generate(p).model;
  EXPECT_FALSE(never.probabilistic());
  EXPECT_TRUE(holds("A G !notified_1", never));
}

TEST(Generate, ExplicitContacts) {
  ScenarioParams p;
  p.citizens = 3;
  p.contacts = ContactGraph::Explicit;
  p.edges = {{1, 2}};
  p.initial_exposed = std::vector<int>{1};
  Model m = generate(p).model;
  EXPECT_TRUE(holds("A G !exposed_3 & A G !infected_3", m));
  EXPECT_TRUE(holds("E F infected_2", m));
}

TEST(Generate, StateGuard) {
  ScenarioParams p;
  p.citizens = 3;
  p.max_states = 50;
  try {
    generate(p);
    FAIL() << "expected the state guard to fire";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("50"), std::string::npos);
  }
  p.citizens = 0;
  p.max_states = 1000;
  EXPECT_THROW(generate(p), ScenarioError);
  p.citizens = 2;
  p.notify_reliability = 1.5;
  EXPECT_THROW(generate(p), ScenarioError);
}

// Regression values for the default contact graph.
TEST(Generate, StateCounts) {
  EXPECT_EQ(generate(params(2, true, true)).model.num_states(), 105u);
  EXPECT_EQ(generate(params(2, false, true)).model.num_states(), 25u);
  EXPECT_EQ(generate(params(3, true, true)).model.num_states(), 1113u);
}

// More adopters never make identification fail.
TEST(Generate, AdoptionMonotone) {
  Formula identify = catalog_formula("R-info-identify");
  for (int n = 1; n <= 3; ++n)
    for (bool testing : {true, false}) {
      std::vector<bool> verdict(1u << n);
      for (unsigned mask = 0; mask < verdict.size(); ++mask) {
        ScenarioParams p = params(n, false, testing);
        for (int i = 0; i < n; ++i) p.adoption[i] = (mask >> i) & 1;
        verdict[mask] = check_formula(identify, generate(p).model).truth == Truth::True;
      }
      for (unsigned lo = 0; lo < verdict.size(); ++lo)
        for (unsigned hi = 0; hi < verdict.size(); ++hi)
          if ((lo & hi) == lo && verdict[lo]) EXPECT_TRUE(verdict[hi]) << lo << " -> " << hi;
      // With one citizen the index case is always citizen 1, so knowing
      // its past exposure is trivial.
      if (n > 1) EXPECT_EQ(verdict.back(), testing);
    }
}

TEST(Catalog, Entries) {
  auto entries = catalog();
  EXPECT_EQ(entries.size(), 125u);
  std::set<std::string> ids;
  for (const auto& r : entries) EXPECT_TRUE(ids.insert(r.id).second) << r.id;
  auto ethics = std::find_if(entries.begin(), entries.end(), [](const Requirement& r) {
    return r.text.find("ethically justifiable") != std::string::npos;
  });
  ASSERT_NE(ethics, entries.end());
  EXPECT_EQ(ethics->status, RequirementStatus::Informal);
  EXPECT_EQ(print(catalog_formula("G-epi-control")), "A F G control_pandemic");
  // The printed catalog parses back to the same entries.
  auto again = parse_spec(catalog_text());
  ASSERT_TRUE(again.ok());
  ASSERT_EQ(again.requirements.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    EXPECT_EQ(again.requirements[i].id, entries[i].id);
    EXPECT_EQ(again.requirements[i].formula.has_value(), entries[i].formula.has_value());
    if (entries[i].formula) EXPECT_EQ(*again.requirements[i].formula, *entries[i].formula);
  }
}

TEST(Catalog, FormalizedEntriesBind) {
  ScenarioModel sm = generate(ScenarioParams{});
  int formalized = 0;
  for (const auto& r : catalog()) {
    if (!r.formula) continue;
    ++formalized;
    Formula f = expand(*r.formula, sm.model);
    EXPECT_TRUE(missing_names(f, sm.model, sm.strategies).empty()) << r.id;
  }
  EXPECT_GE(formalized, 10);
}

}  // namespace
}  // namespace agentcheck
