#include <gtest/gtest.h>

#include <functional>

#include "support.hpp"

namespace rcm {
namespace {

using testing::ex1;

TEST(BuildGraph, Ex1ArcsAndWeights) {
  const auto g = build_graph(ex1());
  ASSERT_EQ(g.arcs.size(), 5u + 2 * 5u);
  EXPECT_EQ(g.num_nodes(), 7u);
  const std::vector<Value> prec_weights{-2, -1, 6, -3, 3};
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(g.arcs[k].weight, prec_weights[k]);
  std::size_t source_arcs = 0, sink_arcs = 0;
  for (const auto& a : g.arcs) {
    if (a.from == g.source()) {
      ++source_arcs;
      EXPECT_EQ(a.weight, 0);
    }
    if (a.to == g.sink()) {
      ++sink_arcs;
      EXPECT_EQ(a.weight, -ex1().durations[a.from]);
    }
  }
  EXPECT_EQ(source_arcs, 5u);
  EXPECT_EQ(sink_arcs, 5u);
}

TEST(BuildGraph, EmptyAndSingle) {
  Instance empty;
  const auto g0 = build_graph(empty);
  EXPECT_EQ(g0.num_nodes(), 2u);
  EXPECT_TRUE(g0.arcs.empty());

  Instance one;
  one.n = 1;
  one.durations = {4};
  one.demands = {{}};
  const auto g1 = build_graph(one);
  ASSERT_EQ(g1.arcs.size(), 2u);
  EXPECT_EQ(g1.arcs[0].from, g1.source());
  EXPECT_EQ(g1.arcs[0].weight, 0);
  EXPECT_EQ(g1.arcs[1].to, g1.sink());
  EXPECT_EQ(g1.arcs[1].weight, -4);
}

TEST(ShortestPaths, Ex1FromSource) {
  const auto g = build_graph(ex1());
  const auto r = shortest_paths(g, g.source());
  const auto& d = std::get<std::vector<Value>>(r);
  EXPECT_EQ(std::vector<Value>(d.begin(), d.begin() + 5), (std::vector<Value>{0, -2, -3, 0, -3}));
}

TEST(ShortestPaths, NegativeCycleWitness) {
  Instance inst;
  inst.n = 2;
  inst.durations = {1, 1};
  inst.demands = {{}, {}};
  inst.precedences = {{0, 1, 2}, {1, 0, -1}};
  const auto g = build_graph(inst);
  const auto r = shortest_paths(g, g.source());
  ASSERT_TRUE(std::holds_alternative<NegativeCycle>(r));
  const auto& cyc = std::get<NegativeCycle>(r).nodes;
  ASSERT_FALSE(cyc.empty());
  // Witness weight is negative.
  Value w = 0;
  for (std::size_t k = 0; k < cyc.size(); ++k) {
    const auto u = cyc[k], v = cyc[(k + 1) % cyc.size()];
    Value best = kUnreachable;
    for (const auto& a : g.arcs)
      if (a.from == u && a.to == v) best = std::min(best, a.weight);
    ASSERT_NE(best, kUnreachable);
    w += best;
  }
  EXPECT_LT(w, 0);
}

TEST(ShortestPaths, DirectArcsOnly) {
  AonGraph g;
  g.num_activities = 2;
  g.arcs = {{2, 0, -4}, {2, 1, 7}};
  const auto d = std::get<std::vector<Value>>(shortest_paths(g, 2));
  EXPECT_EQ(d[0], -4);
  EXPECT_EQ(d[1], 7);
  EXPECT_EQ(d[3], kUnreachable);
}

TEST(ComputeTemporal, Ex1Windows) {
  const auto info = std::get<TemporalInfo>(compute_temporal(ex1(), 15));
  EXPECT_EQ(info.est, (std::vector<Value>{0, 2, 3, 0, 3}));
  EXPECT_EQ(info.lst, (std::vector<Value>{8, 10, 12, 10, 13}));
  EXPECT_EQ(info.tail, (std::vector<Value>{7, 5, 3, 5, 2}));
}

TEST(ComputeTemporal, Ex1HorizonSevenIsInfeasible) {
  // Windows alone stay non-empty at 7; the resource rules it out.
  EXPECT_TRUE(std::holds_alternative<TemporalInfo>(compute_temporal(ex1(), 7)));
  EXPECT_EQ(brute_force_solve(ex1(7), 10'000'000).status, BruteForceStatus::Infeasible);
}

TEST(ComputeTemporal, NegativeCycleCause) {
  Instance inst;
  inst.n = 2;
  inst.durations = {1, 1};
  inst.demands = {{}, {}};
  inst.precedences = {{0, 1, 2}, {1, 0, -1}};
  const auto r = compute_temporal(inst, 20);
  ASSERT_TRUE(std::holds_alternative<TemporalInfeasible>(r));
  EXPECT_EQ(std::get<TemporalInfeasible>(r).cause, TemporalInfeasible::Cause::NegativeCycle);
}

TEST(ComputeTemporal, EmptyWindowCause) {
  const auto r = compute_temporal(ex1(), 6);
  ASSERT_TRUE(std::holds_alternative<TemporalInfeasible>(r));
  EXPECT_EQ(std::get<TemporalInfeasible>(r).cause, TemporalInfeasible::Cause::EmptyWindow);
}

TEST(ComputeTemporal, WindowsContainEveryFeasibleSchedule) {
  testing::GenParams g;
  g.max_n = 4;
  g.horizon_cap = 8;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto inst = testing::random_instance(seed, g);
    inst.capacities.assign(inst.num_resources(), 100);  // precedence-only
    const auto t = compute_temporal(inst, *inst.horizon);
    std::vector<Value> s(inst.n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == inst.n) {
        if (!check_schedule(inst, make_schedule(inst, s)).empty()) return;
        ASSERT_TRUE(std::holds_alternative<TemporalInfo>(t)) << "seed " << seed;
        const auto& info = std::get<TemporalInfo>(t);
        for (std::size_t k = 0; k < inst.n; ++k) {
          EXPECT_LE(info.est[k], s[k]);
          EXPECT_LE(s[k], info.lst[k]);
        }
        return;
      }
      for (Value v = 0; v + inst.durations[i] <= *inst.horizon; ++v) {
        s[i] = v;
        rec(i + 1);
      }
    };
    rec(0);
    if (auto* info = std::get_if<TemporalInfo>(&t)) {
      for (std::size_t k = 0; k < inst.n; ++k) EXPECT_EQ(info->lst[k], *inst.horizon - info->tail[k]);
      // Precedence-only: windows non-empty means the earliest schedule is feasible.
      EXPECT_TRUE(check_schedule(inst, make_schedule(inst, info->est)).empty()) << "seed " << seed;
    }
  }
}

TEST(ComputeTemporal, NegativeCycleIffInfeasibleAtEveryHorizon) {
  testing::GenParams g;
  g.max_n = 4;
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    auto inst = testing::random_instance(seed, g);
    inst.capacities.assign(inst.num_resources(), 100);
    inst.horizon = std::max<Value>(1, trivial_horizon(inst));
    const bool cycle = std::holds_alternative<NegativeCycle>(shortest_paths(build_graph(inst), inst.n));
    const auto bf = brute_force_solve(inst, 50'000'000);
    ASSERT_NE(bf.status, BruteForceStatus::Exhausted);
    EXPECT_EQ(cycle, bf.status == BruteForceStatus::Infeasible) << "seed " << seed;
  }
}

TEST(DisjunctivePairs, Ex1) {
  using P = std::pair<std::size_t, std::size_t>;
  EXPECT_EQ(disjunctive_pairs(ex1()), (std::vector<P>{{0, 1}, {0, 3}, {0, 4}}));
}

TEST(DisjunctivePairs, ZeroDemandsAndFullCapacity) {
  auto inst = ex1();
  for (auto& row : inst.demands) row = {0};
  EXPECT_TRUE(disjunctive_pairs(inst).empty());

  Instance two;
  two.n = 2;
  two.durations = {1, 1};
  two.demands = {{4}, {4}};
  two.capacities = {4};
  using P = std::pair<std::size_t, std::size_t>;
  EXPECT_EQ(disjunctive_pairs(two), (std::vector<P>{{0, 1}}));
}

TEST(TrivialHorizon, SumOfDurationsAndLags) {
  EXPECT_EQ(trivial_horizon(ex1()), 15);
  Instance one;
  one.n = 1;
  one.durations = {4};
  one.demands = {{}};
  EXPECT_EQ(trivial_horizon(one), 4);
  EXPECT_EQ(trivial_horizon(Instance{}), 0);
}

}  // namespace
}  // namespace rcm
