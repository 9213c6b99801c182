#include <gtest/gtest.h>

#include <random>

#include "agentcheck/checker.hpp"
#include "agentcheck/parser.hpp"
#include "agentcheck/scenario.hpp"
#include "agentcheck/strategic.hpp"
#include "oracle.hpp"
#include "random_model.hpp"

namespace agentcheck {
namespace {

using Names = std::vector<std::string>;

CheckOptions uniform_options() {
  CheckOptions o;
  o.mode = CheckMode::Uniform;
  return o;
}

Verdict check(const std::string& text, const Model& m, const CheckOptions& o = {}) {
  return check_formula(parse_formula(text), m, o);
}

bool holds(const std::string& text, const Model& m, const CheckOptions& o = {}) {
  return check(text, m, o).holds_initially;
}

// Both players pick heads or tails at once; equal choices make p true.
Model matching_pennies() {
  ModelBuilder b({"1", "2"});
  b.add_atom("p");
  b.add_state("s0", Names{"l", "l"});
  b.add_state("win", Names{"l", "l"});
  b.add_state("lose", Names{"l", "l"});
  b.label(1, "p");
  for (StateId s = 0; s < 3; ++s)
    for (const char* x : {"h", "t"})
      for (const char* y : {"h", "t"}) {
        StateId to = s == 0 ? (std::string(x) == y ? 1 : 2) : s;
        b.add_transition(s, Names{x, y}, {{to, 1.0}});
      }
  b.add_initial(0);
  return std::move(b).build();
}

// s0 and s1 look alike to agent 1: a then b wins, any constant choice loses.
Model needs_memoryless_distinction() {
  ModelBuilder b({"1"});
  b.add_atom("win");
  b.add_state("s0", {"l"});
  b.add_state("s1", {"l"});
  b.add_state("win", {"w"});
  b.add_state("lose", {"w"});
  b.label(2, "win");
  b.add_transition(0, {"a"}, {{1, 1.0}});
  b.add_transition(0, {"b"}, {{3, 1.0}});
  b.add_transition(1, {"a"}, {{3, 1.0}});
  b.add_transition(1, {"b"}, {{2, 1.0}});
  b.add_transition(2, {"stay"}, {{2, 1.0}});
  b.add_transition(3, {"stay"}, {{3, 1.0}});
  b.add_initial(0);
  return std::move(b).build();
}

// Agent 1 observes o. From s0 (o) action a leads on to s1, where only b
// wins; a single catch-all rule cannot do both.
Model guarded_choice() {
  ModelBuilder b({"1"});
  b.add_atom("o");
  b.add_atom("win");
  b.add_state("s0", {"x"});
  b.add_state("s1", {"y"});
  b.add_state("win", {"w"});
  b.add_state("lose", {"w"});
  b.label(0, "o");
  b.label(2, "win");
  b.set_observable("1", {"o"});
  b.add_transition(0, {"a"}, {{1, 1.0}});
  b.add_transition(0, {"b"}, {{3, 1.0}});
  b.add_transition(1, {"a"}, {{3, 1.0}});
  b.add_transition(1, {"b"}, {{2, 1.0}});
  for (StateId s : {2u, 3u})
    for (const char* a : {"a", "b"}) b.add_transition(s, {a}, {{s, 1.0}});
  b.add_initial(0);
  return std::move(b).build();
}

TEST(Coalition, NextStep) {
  Model m = matching_pennies();
  EXPECT_FALSE(holds("<<1>> X p", m));
  EXPECT_FALSE(holds("<<2>> X !p", m));
  EXPECT_TRUE(holds("<<1,2>> X p", m));
  EXPECT_TRUE(holds("<<1,2>> X !p", m));
  EXPECT_FALSE(holds("<<>> X p", m));
  EXPECT_TRUE(holds("<<>> X (p | !p)", m));
}

TEST(Coalition, EmptyCoalitionIsUniversal) {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    testing::RandomModelOptions o;
    o.probabilistic = i % 2;
    Model m = testing::random_model(rng, o);
    for (const char* body : {"X p", "F p", "G p", "(p U q)", "F<=2 q"})
      for (const CheckOptions& opt : {CheckOptions{}, uniform_options()})
        EXPECT_EQ(check(std::string("<<>> ") + body, m, opt).sat,
                  check(std::string("A ") + body, m, opt).sat)
            << body;
  }
}

TEST(Coalition, GrandCoalitionIsExistential) {
  std::mt19937 rng(12);
  for (int i = 0; i < 100; ++i) {
    Model m = testing::random_model(rng);
    for (const char* body : {"X p", "F p", "G p", "(p U q)", "F<=2 q"})
      EXPECT_EQ(check(std::string("<<1,2>> ") + body, m).sat,
                check(std::string("E ") + body, m).sat)
          << body;
  }
}

TEST(Coalition, UniformNeedsDistinctions) {
  Model m = needs_memoryless_distinction();
  EXPECT_TRUE(holds("<<1>> F win", m));
  EXPECT_FALSE(holds("<<1>> F win", m, uniform_options()));
}

TEST(Coalition, UniformWithinPerfectInformation) {
  std::mt19937 rng(13);
  testing::RandomFormulaOptions fo;
  fo.coalitions = true;
  fo.knowledge = false;
  for (int i = 0; i < 150; ++i) {
    testing::RandomModelOptions o;
    o.max_states = 5;
    Model m = testing::random_model(rng, o);
    Formula f = make_coalition({"1"}, testing::random_body(rng, fo, 1, false));
    StateSet ir = check_formula(f, m, uniform_options()).sat;
    StateSet IR = check_formula(f, m).sat;
    EXPECT_TRUE(ir.is_subset_of(IR)) << print(f);
  }
}

TEST(Coalition, UniformEqualsPerfectInformationWhenObservable) {
  std::mt19937 rng(14);
  testing::RandomFormulaOptions fo;
  fo.coalitions = true;
  for (int i = 0; i < 150; ++i) {
    testing::RandomModelOptions o;
    o.max_states = 5;
    o.perfect_information = true;
    Model m = testing::random_model(rng, o);
    Formula f = testing::random_formula(rng, fo);
    EXPECT_EQ(check_formula(f, m, uniform_options()).sat, check_formula(f, m).sat) << print(f);
  }
}

void compare_with_oracle(bool uniform, unsigned seed) {
  std::mt19937 rng(seed);
  testing::RandomFormulaOptions fo;
  fo.coalitions = true;
  fo.depth = 2;
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    testing::RandomModelOptions o;
    o.max_states = 5;
    Model m = testing::random_model(rng, o);
    testing::BruteForce oracle(m, uniform);
    for (int k = 0; k < 5; ++k) {
      Formula f = testing::random_formula(rng, fo);
      Verdict v = uniform ? check_formula(f, m, uniform_options()) : check_formula(f, m);
      auto expect = oracle.eval(f);
      for (StateId s = 0; s < m.num_states(); ++s)
        if (oracle.reachable()[s]) ASSERT_EQ(v.sat.contains(s), expect[s]) << print(f);
      ++compared;
    }
  }
  EXPECT_EQ(compared, 1000);
}

TEST(Oracle, PerfectInformationStrategies) { compare_with_oracle(false, 21); }
TEST(Oracle, UniformStrategies) { compare_with_oracle(true, 22); }

TEST(Coalition, MonotoneInCoalition) {
  std::mt19937 rng(15);
  for (int i = 0; i < 100; ++i) {
    testing::RandomModelOptions o;
    o.agents = 3;
    o.max_states = 5;
    Model m = testing::random_model(rng, o);
    for (const char* body : {"X p", "F p", "G q", "(p U q)"})
      for (const CheckOptions& opt : {CheckOptions{}, uniform_options()}) {
        StateSet one = check(std::string("<<1>> ") + body, m, opt).sat;
        StateSet two = check(std::string("<<1,2>> ") + body, m, opt).sat;
        StateSet three = check(std::string("<<1,2,3>> ") + body, m, opt).sat;
        EXPECT_TRUE(one.is_subset_of(two));
        EXPECT_TRUE(two.is_subset_of(three));
      }
  }
}

TEST(Coalition, Errors) {
  Model m = matching_pennies();
  EXPECT_THROW(check("<<1>> F G p", m), CheckError);
  EXPECT_THROW(check("<<1>> G F p", m), CheckError);
  EXPECT_THROW(check("<<9>> F p", m), BindingError);

  // Agent 1 has different actions in two states sharing its token.
  ModelBuilder b({"1"});
  b.add_atom("p");
  b.add_state("s0", {"l"});
  b.add_state("s1", {"l"});
  b.label(1, "p");
  b.add_transition(0, {"a"}, {{1, 1.0}});
  b.add_transition(0, {"b"}, {{0, 1.0}});
  b.add_transition(1, {"c"}, {{1, 1.0}});
  b.add_initial(0);
  Model bad = std::move(b).build();
  EXPECT_TRUE(holds("<<1>> F p", bad));
  EXPECT_THROW(check("<<1>> F p", bad, uniform_options()), CheckError);
}

TEST(Coalition, UnknownWithinBudget) {
  CheckOptions o = uniform_options();
  o.max_uniform_strategies = 1;
  Verdict v = check("<<1>> F win", needs_memoryless_distinction(), o);
  EXPECT_EQ(v.truth, Truth::Unknown);
  EXPECT_FALSE(v.holds_initially);
  o.max_uniform_strategies = 1000;
  EXPECT_EQ(check("<<1>> F win", needs_memoryless_distinction(), o).truth, Truth::False);
}

TEST(Natural, Complexity) {
  NaturalStrategy s{"a", {{{{"infected_1", true}}, "quarantine"}, {{}, "wait"}}};
  EXPECT_EQ(s.complexity(), 2u);
  NaturalStrategy t{"a", {{{}, "wait"}}};
  EXPECT_EQ(t.complexity(), 1u);
  NaturalStrategy u{"a", {{{{"p", true}, {"q", false}}, "x"}, {{}, "y"}}};
  EXPECT_EQ(u.complexity(), 3u);
}

TEST(Natural, CatchAllSuffices) {
  Model m = needs_memoryless_distinction();
  // A single `true -> b` rule loses at s0, `true -> a` loses at s1.
  EXPECT_FALSE(holds("<<1>>[compl<=1] F win", m));
  EXPECT_FALSE(holds("<<1>>[compl<=4] F win", m));
  // No single action is enabled in every state, so no catch-all rule is valid.
  EXPECT_FALSE(holds("<<1>>[compl<=1] G !win", m));
}

TEST(Natural, GuardNeeded) {
  Model m = guarded_choice();
  EXPECT_FALSE(holds("<<1>>[compl<=1] F win", m));
  Verdict v = check("<<1>>[compl<=2] F win", m);
  EXPECT_EQ(v.truth, Truth::True);
  EXPECT_NE(v.strategy.find("o"), std::string::npos);
  EXPECT_TRUE(holds("<<1>>[compl<=3] F win", m));

  NaturalStrategy good{"1", {{{{"o", true}}, "a"}, {{}, "b"}}};
  EXPECT_EQ(verify_natural(parse_formula("<<1>> F win"), m, good).truth, Truth::True);
  NaturalStrategy bad{"1", {{{{"o", true}}, "b"}, {{}, "a"}}};
  EXPECT_EQ(verify_natural(parse_formula("<<1>> F win"), m, bad).truth, Truth::False);
  NaturalStrategy hidden{"1", {{{{"win", true}}, "b"}, {{}, "a"}}};
  EXPECT_THROW(verify_natural(parse_formula("<<1>> F win"), m, hidden), CheckError);
}

TEST(Natural, MonotoneAndWithinUniform) {
  std::mt19937 rng(16);
  for (int i = 0; i < 100; ++i) {
    testing::RandomModelOptions o;
    o.max_states = 5;
    o.agents = 1 + i % 2;
    Model m = testing::random_model(rng, o);
    for (const char* body : {"F p", "G q", "F<=2 p"}) {
      StateSet prev(m.num_states());
      for (int c = 1; c <= 4; ++c) {
        StateSet cur =
            check("<<1>>[compl<=" + std::to_string(c) + "] " + body, m).sat;
        EXPECT_TRUE(prev.is_subset_of(cur)) << body << " c=" << c;
        prev = cur;
      }
      EXPECT_TRUE(prev.is_subset_of(check(std::string("<<1>> ") + body, m, uniform_options()).sat))
          << body;
    }
  }
}

// s0: agent a may quarantine (reaching contained) or wait (staying put).
Model lockdown() {
  ModelBuilder b({"a"});
  b.add_atom("contained");
  b.add_state("s0", {"l"});
  b.add_state("s1", {"m"});
  b.label(1, "contained");
  b.add_transition(0, {"quarantine"}, {{1, 1.0}});
  b.add_transition(0, {"wait"}, {{0, 1.0}});
  b.add_transition(1, {"rest"}, {{1, 1.0}});
  b.add_initial(0);
  return std::move(b).build();
}

TEST(Coalition, UniformWitnessStrategy) {
  Verdict v = check("<<a>> F contained", lockdown(), uniform_options());
  EXPECT_EQ(v.truth, Truth::True);
  EXPECT_NE(v.strategy.find("a:l=quarantine"), std::string::npos) << v.strategy;
}

TEST(Suppose, FixesTheAgentsChoice) {
  Model m = lockdown();
  CheckOptions o;
  o.strategies = {{"lockdown", "a", {{"l", "quarantine"}, {"m", "rest"}}},
                  {"idle", "a", {{"l", "wait"}, {"m", "rest"}}}};
  EXPECT_FALSE(holds("A F contained", m, o));
  EXPECT_TRUE(holds("supp(a: lockdown) A F contained", m, o));
  EXPECT_FALSE(holds("supp(a: idle) A F contained", m, o));
  EXPECT_TRUE(holds("supp(a: idle) A G !contained", m, o));
  EXPECT_TRUE(holds("!A F contained & supp(a: lockdown) A F contained", m, o));
  EXPECT_THROW(check("supp(a: nothing) A F contained", m, o), BindingError);
}

TEST(Scenario, MonitoringNeedsTesting) {
  const char* formula = "<<a>> G (K[a] outbreak | K[a] !outbreak)";
  ScenarioParams p;
  p.citizens = 2;
  EXPECT_TRUE(holds(formula, generate(p).model));
  p.testing = false;
  EXPECT_FALSE(holds(formula, generate(p).model));
}

}  // namespace
}  // namespace agentcheck
