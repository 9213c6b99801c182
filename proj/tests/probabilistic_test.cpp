#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "agentcheck/checker.hpp"
#include "agentcheck/parser.hpp"
#include "agentcheck/probabilistic.hpp"
#include "agentcheck/rewrite.hpp"
#include "agentcheck/scenario.hpp"
#include "oracle.hpp"
#include "random_model.hpp"

namespace agentcheck {
namespace {

using Names = std::vector<std::string>;

// s0 moves to goal with probability `p`, otherwise back to s0 (retry) or
// to an absorbing sink.
Model split(double p, bool retry) {
  ModelBuilder b({"1"});
  b.add_atom("goal");
  b.add_state("s0", {"l"});
  b.add_state("goal", {"l"});
  b.add_state("sink", {"l"});
  b.label(1, "goal");
  b.add_transition(0, {"go"}, {{1, p}, {retry ? 0u : 2u, 1 - p}});
  b.add_transition(1, {"go"}, {{1, 1.0}});
  b.add_transition(2, {"go"}, {{2, 1.0}});
  b.add_initial(0);
  return std::move(b).build();
}

StateSet goal_states(const Model& m, const char* atom = "goal") {
  StateSet g(m.num_states());
  auto a = *m.find_atom(atom);
  for (StateId s = 0; s < m.num_states(); ++s)
    if (m.holds(a, s)) g.insert(s);
  return g;
}

Verdict check(const std::string& text, const Model& m, const CheckOptions& o = {}) {
  return check_formula(parse_formula(text), m, o);
}

TEST(Values, HalfSplit) {
  Model m = split(0.5, false);
  auto v = reach_value(m, make_agent_mask(m, {"1"}), goal_states(m));
  EXPECT_DOUBLE_EQ(v[0], 0.5);
  EXPECT_DOUBLE_EQ(v[1], 1.0);
  EXPECT_DOUBLE_EQ(v[2], 0.0);
  Verdict half = check("<<1>>[P>=0.5] F goal", m);
  EXPECT_EQ(half.truth, Truth::True);
  ASSERT_TRUE(half.value);
  EXPECT_DOUBLE_EQ(*half.value, 0.5);
  EXPECT_FALSE(check("<<1>>[P>=0.51] F goal", m).sat.contains(0));
  EXPECT_FALSE(check("<<1>>[P>=1] F goal", m).sat.contains(0));
  EXPECT_EQ(check("<<1>>[P>=0] F goal", m).sat, reachable(m));
}

TEST(Values, RetryLoopReachesOne) {
  Model m = split(0.5, true);
  auto v = reach_value(m, make_agent_mask(m, {"1"}), goal_states(m));
  EXPECT_NEAR(v[0], 1.0, 1e-6);
  EXPECT_LT(v.residual, 1e-8);
  EXPECT_GT(v.iterations, 10u);
  for (std::uint32_t k = 0; k <= 12; ++k) {
    auto b = reach_value(m, make_agent_mask(m, {"1"}), goal_states(m), k);
    EXPECT_NEAR(b[0], 1 - std::pow(0.5, k), 1e-15);
    EXPECT_EQ(b.iterations, k);
  }
}

TEST(Values, OpponentsMinimise) {
  // Agent 2 picks the odds; agent 1 has no say.
  ModelBuilder b({"1", "2"});
  b.add_atom("goal");
  b.add_state("s0", Names{"l", "l"});
  b.add_state("goal", Names{"l", "l"});
  b.add_state("sink", Names{"l", "l"});
  b.label(1, "goal");
  b.add_transition(0, Names{"wait", "good"}, {{1, 0.9}, {2, 0.1}});
  b.add_transition(0, Names{"wait", "bad"}, {{1, 0.2}, {2, 0.8}});
  for (StateId s : {1u, 2u}) {
    b.add_transition(s, Names{"wait", "good"}, {{s, 1.0}});
    b.add_transition(s, Names{"wait", "bad"}, {{s, 1.0}});
  }
  b.add_initial(0);
  Model m = std::move(b).build();
  auto value = [&](const Names& c) {
    return reach_value(m, make_agent_mask(m, c), goal_states(m))[0];
  };
  EXPECT_NEAR(value({"1"}), 0.2, 1e-12);
  EXPECT_NEAR(value({}), 0.2, 1e-12);
  EXPECT_NEAR(value({"2"}), 0.9, 1e-12);
  EXPECT_NEAR(value({"1", "2"}), 0.9, 1e-12);
}

TEST(Values, PointDistributionsMatchQualitative) {
  std::mt19937 rng(31);
  for (int i = 0; i < 150; ++i) {
    testing::RandomModelOptions o;
    o.max_states = 7;
    o.agents = 1 + i % 3;
    Model m = testing::random_model(rng, o);
    auto v = reach_value(m, make_agent_mask(m, {"1"}), goal_states(m, "p"));
    for (StateId s = 0; s < m.num_states(); ++s)
      EXPECT_TRUE(v[s] == 0.0 || v[s] == 1.0) << v[s];
    for (const char* body : {"F p", "F<=2 p", "F (p & q)"}) {
      const std::string pb = std::string("<<1>>[P>=0.5] ") + body;
      EXPECT_EQ(check(pb, m).sat, check(std::string("<<1>> ") + body, m).sat) << body;
      EXPECT_EQ(check("<<1>>[P>=1] " + std::string(body), m).sat,
                check(std::string("<<1>> ") + body, m).sat)
          << body;
    }
  }
}

TEST(Values, SweepsAreMonotone) {
  std::mt19937 rng(32);
  for (int i = 0; i < 100; ++i) {
    testing::RandomModelOptions o;
    o.probabilistic = true;
    o.max_states = 8;
    Model m = testing::random_model(rng, o);
    auto mask = make_agent_mask(m, {"1"});
    auto goal = goal_states(m, "p");
    auto full = reach_value(m, mask, goal);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(m.num_states());
    for (std::uint32_t k = 0; k <= 25; ++k) {
      auto b = reach_value(m, mask, goal, k);
      for (StateId s = 0; s < m.num_states(); ++s) {
        EXPECT_GE(b[s], prev[s] - 1e-15);
        // The unbounded sweep stops at residual < 1e-8, a few 1e-9 short.
        EXPECT_LE(b[s], full[s] + 1e-7) << k;
        EXPECT_GE(b[s], 0.0);
        EXPECT_LE(b[s], 1.0);
      }
      prev = b.values;
    }
  }
}

TEST(Values, ThresholdsNest) {
  std::mt19937 rng(33);
  for (int i = 0; i < 60; ++i) {
    testing::RandomModelOptions o;
    o.probabilistic = true;
    Model m = testing::random_model(rng, o);
    StateSet prev = reachable(m);
    for (double p : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      StateSet cur = check("<<1>>[P>=" + std::to_string(p) + "] F q", m).sat;
      EXPECT_TRUE(cur.is_subset_of(prev)) << p;
      prev = cur;
    }
  }
}

TEST(Oracle, MarkovChainsMatchLinearSolve) {
  std::mt19937 rng(34);
  int chains = 0;
  for (int i = 0; i < 60; ++i) {
    testing::RandomModelOptions o;
    o.probabilistic = true;
    o.agents = 1;
    o.max_actions = 1;
    o.min_states = 5;
    o.max_states = 20;
    Model m = testing::random_model(rng, o);
    const auto n = static_cast<Eigen::Index>(m.num_states());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (StateId s = 0; s < m.num_states(); ++s) {
      auto [lo, hi] = m.transitions(s);
      ASSERT_EQ(hi - lo, 1u);
      for (const auto& x : m.successors(lo)) p(s, x.target) += x.probability;
    }
    auto goal = goal_states(m, "p");
    std::vector<bool> g(m.num_states());
    for (StateId s = 0; s < m.num_states(); ++s) g[s] = goal.contains(s);
    Eigen::VectorXd exact = testing::chain_reach(p, g);
    auto v = reach_value(m, make_agent_mask(m, {"1"}), goal);
    for (StateId s = 0; s < m.num_states(); ++s) EXPECT_NEAR(v[s], exact[s], 1e-6);
    ++chains;
  }
  EXPECT_GE(chains, 50);
}

TEST(Oracle, GrandCoalitionMatchesPolicyEnumeration) {
  std::mt19937 rng(35);
  for (int i = 0; i < 100; ++i) {
    testing::RandomModelOptions o;
    o.probabilistic = true;
    o.max_states = 5;
    Model m = testing::random_model(rng, o);
    auto goal = goal_states(m, "q");
    std::vector<bool> g(m.num_states());
    for (StateId s = 0; s < m.num_states(); ++s) g[s] = goal.contains(s);
    Eigen::VectorXd best = testing::mdp_max_reach(m, g);
    auto v = reach_value(m, make_agent_mask(m, {"1", "2"}), goal);
    for (StateId s = 0; s < m.num_states(); ++s) EXPECT_NEAR(v[s], best[s], 1e-6);
  }
}

TEST(Errors, Convergence) {
  Model m = split(0.5, true);
  ValueIterationOptions o;
  o.max_iter = 3;
  try {
    reach_value(m, make_agent_mask(m, {"1"}), goal_states(m), std::nullopt, o);
    FAIL() << "expected a convergence error";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-8);
  }
  CheckOptions c;
  c.max_iter = 3;
  EXPECT_THROW(check("<<1>>[P>=0.5] F goal", m, c), ConvergenceError);
}

TEST(Errors, UnsupportedBody) {
  Model m = split(0.5, false);
  for (PathBody body : {globally(make_atom("goal")), next(make_atom("goal")),
                        until(make_true(), make_atom("goal"))}) {
    Formula f = make_coalition({"1"}, body, ProbabilityBound{0.5});
    EXPECT_THROW(prob_eval(f, m), CheckError) << print(f);
  }
}

TEST(Scenario, CompositeAtReliability095) {
  ScenarioParams p;
  p.citizens = 2;
  p.notify_reliability = 0.95;
  Model m = generate(p).model;

  Verdict v = check(
      "A G (K[a] ONCE exposed_1 -> <<a>>[P>=0.99] F<=10 <<1>>[compl<=5] F K[1] ONCE exposed_1)",
      m);
  EXPECT_EQ(v.truth, Truth::True);
  // One attempt succeeds with probability 0.95 only.
  EXPECT_EQ(check("A G (K[a] ONCE exposed_1 -> <<a>>[P>=0.99] F<=1 <<1>>[compl<=5] F K[1] "
                  "ONCE exposed_1)",
                  m)
                .truth,
            Truth::False);

  // Closed form: ten independent attempts, each failing with probability 0.05.
  Formula inner = parse_formula("<<1>>[compl<=5] F K[1] ONCE exposed_1");
  Formula cond = parse_formula("K[a] ONCE exposed_1 & !notified_1");
  PreparedSpec ps = prepare({inner, cond}, m);
  StateSet goal = evaluate(compile_once(inner, ps.operands), *ps.model).sat;
  StateSet start = evaluate(compile_once(cond, ps.operands), *ps.model).sat;
  ASSERT_FALSE(start.empty());
  auto value = reach_value(*ps.model, make_agent_mask(*ps.model, {"a"}), goal, 10);
  const double closed = 1 - std::pow(0.05, 10);
  for (StateId s : start.members()) EXPECT_NEAR(value[s], closed, 1e-12);
}

}  // namespace
}  // namespace agentcheck
