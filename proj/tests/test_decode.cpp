#include <gtest/gtest.h>

#include <cmath>

#include "mtlkd/core/construct.hpp"
#include "mtlkd/core/decode.hpp"
#include "mtlkd/core/error.hpp"
#include "mtlkd/core/verify.hpp"
#include "mtlkd/data/generate.hpp"
#include "support/oracles.hpp"

namespace mtlkd {
namespace {

using testing::hand_instance;

Instance tw_instance(VariantSpec v, std::vector<Point> pts, std::vector<TimeWindow> windows) {
  std::vector<int> demand(pts.size() - 1, 1);
  Instance inst = hand_instance(v, std::move(pts), demand);
  for (std::size_t i = 1; i < inst.tw.size(); ++i) {
    inst.tw[i] = windows[i - 1];
    inst.service_time[i] = kDefaultServiceTime;
  }
  return inst;
}

TEST(InitialState, DefaultsFromInstance) {
  auto inst = data::generate_instance(kVRPL, 5, 1);
  const DecodeState s = initial_state(inst);
  EXPECT_EQ(s.l_r, 50.0);
  EXPECT_EQ(s.d_r, 3.0);
  EXPECT_EQ(s.last, 0);
  EXPECT_EQ(s.t_c, 0.0);
  EXPECT_FALSE(s.open);
  for (char v : s.visited) EXPECT_FALSE(v);
  EXPECT_TRUE(initial_state(data::generate_instance(kOVRP, 5, 1)).open);
}

TEST(Transition, LinehaulReducesLoad) {
  auto inst = hand_instance(kCVRP, {{0, 0}, {0.5, 0}}, {7});
  const DecodeState s = transition(inst, initial_state(inst), 1);
  EXPECT_EQ(s.l_r, 43.0);
  EXPECT_TRUE(s.visited[1]);
  EXPECT_TRUE(s.done);
}

TEST(Transition, EarlyArrivalWaits) {
  auto inst = tw_instance(kVRPTW, {{0, 0}, {0.9, 0}}, {{1.2, 2.0}});
  const DecodeState s = transition(inst, initial_state(inst), 1);
  EXPECT_NEAR(s.t_c, 1.4, 1e-12);
}

TEST(Transition, DepotResetsRouteFields) {
  auto inst = hand_instance(VariantSpec{.duration_limit = true, .time_window = true},
                            {{0, 0}, {0.3, 0.4}, {0.6, 0.8}}, {5, 6});
  DecodeState s = transition(inst, initial_state(inst), 1);
  EXPECT_LT(s.d_r, 3.0);
  s = transition(inst, s, 0);
  EXPECT_EQ(s.l_r, 50.0);
  EXPECT_EQ(s.t_c, 0.0);
  EXPECT_EQ(s.d_r, 3.0);
  EXPECT_EQ(s.last, 0);
}

TEST(Transition, MaskedActionThrows) {
  auto inst = hand_instance(kCVRP, {{0, 0}, {0.5, 0}, {0.2, 0}}, {7, 3});
  const DecodeState s0 = initial_state(inst);
  EXPECT_THROW(transition(inst, s0, 0), ContractViolation);
  const DecodeState s1 = transition(inst, s0, 1);
  EXPECT_THROW(transition(inst, s1, 1), ContractViolation);
  EXPECT_THROW(transition(inst, s1, 5), ContractViolation);
}

TEST(Mask, CapacityShortfall) {
  auto inst = hand_instance(kCVRP, {{0, 0}, {0.5, 0}, {0.2, 0}}, {7, 5});
  inst.capacity = 10;
  const DecodeState s = transition(inst, initial_state(inst), 1);
  EXPECT_DOUBLE_EQ(s.l_r, 3.0);
  const FeasibilityMask m = feasibility_mask(inst, s);
  EXPECT_FALSE(m.allowed[2]);
  EXPECT_EQ(m.reason[2], MaskReason::kCapacity);
  EXPECT_TRUE(m.allowed[0]);
}

TEST(Mask, BackhaulAccumulatorsAreIndependent) {
  auto inst = hand_instance(kVRPB, {{0, 0}, {0.1, 0}, {0.2, 0}, {0.3, 0}}, {9, -9, -2});
  inst.capacity = 10;
  DecodeState s = transition(inst, initial_state(inst), 1);
  s = transition(inst, s, 2);  // 9 delivered, 9 collected: both fit
  const FeasibilityMask m = feasibility_mask(inst, s);
  EXPECT_EQ(m.reason[3], MaskReason::kCapacity);  // 9 + 2 > 10 collected
}

TEST(Mask, ClosedReturnWindowVersusOpen) {
  const std::vector<Point> pts = {{0, 0}, {0.4, 0}};
  const std::vector<TimeWindow> win = {{2.7, 2.9}};
  auto closed = tw_instance(kVRPTW, pts, win);
  auto open = tw_instance(kOVRPTW, pts, win);
  const FeasibilityMask mc = feasibility_mask(closed, initial_state(closed));
  EXPECT_FALSE(mc.allowed[1]);
  EXPECT_EQ(mc.reason[1], MaskReason::kReturnWindow);
  EXPECT_TRUE(feasibility_mask(open, initial_state(open)).allowed[1]);
}

TEST(Mask, LateArrival) {
  auto inst = tw_instance(kOVRPTW, {{0, 0}, {0.5, 0}}, {{0.1, 0.3}});
  EXPECT_EQ(feasibility_mask(inst, initial_state(inst)).reason[1], MaskReason::kTimeWindow);
}

TEST(Mask, DurationReservesReturn) {
  // Square tour 0 -> 1 -> 3 -> 2 -> 0 has length 3.6; node 2 is allowed only
  // if its return leg still fits.
  auto inst = hand_instance(kVRPL, {{0, 0}, {0.9, 0}, {0, 0.9}, {0.9, 0.9}}, {1, 1, 1});
  inst.duration_limit = 3.6 + 1e-12;
  DecodeState s = transition(inst, initial_state(inst), 1);
  s = transition(inst, s, 3);
  EXPECT_TRUE(feasibility_mask(inst, s).allowed[2]);
  inst.duration_limit = 3.5;
  s = transition(inst, initial_state(inst), 1);
  s = transition(inst, s, 3);
  EXPECT_EQ(feasibility_mask(inst, s).reason[2], MaskReason::kDuration);
}

TEST(Mask, DepotMaskedOnEmptyRoute) {
  auto inst = hand_instance(kCVRP, {{0, 0}, {0.5, 0}, {0.2, 0}}, {1, 1});
  const FeasibilityMask m = feasibility_mask(inst, initial_state(inst));
  EXPECT_FALSE(m.allowed[0]);
  EXPECT_EQ(m.reason[0], MaskReason::kDepotRepeat);
  const auto add = m.additive();
  EXPECT_EQ(add[0], kMaskedLogit);
  EXPECT_EQ(add[1], 0.0);
}

TEST(Verify, GreedyConstructionIsFeasible) {
  for (const auto& v : all_variants()) {
    auto inst = data::generate_instance(v, 20, 3);
    const Solution sol = testing::nearest_neighbor(inst);
    const VerifyReport rep = verify(inst, sol);
    EXPECT_TRUE(rep.feasible) << v.name();
    EXPECT_TRUE(rep.violations.empty());
  }
}

TEST(Verify, LateVisitIsTimeWindowViolation) {
  auto inst = tw_instance(kVRPTW, {{0, 0}, {0.5, 0}, {0.5, 0.1}},
                          {{0.0, 2.5}, {0.0, 0.3}});
  const VerifyReport rep = verify(inst, Solution{{{1, 2}}});
  EXPECT_FALSE(rep.feasible);
  EXPECT_TRUE(rep.has(ViolationCode::kTimeWindow));
}

TEST(Verify, LongRouteIsDurationViolation) {
  auto inst = hand_instance(kVRPL, {{0, 0}, {0.8, 0}, {0.8, 0.8}, {0, 0.8}}, {1, 1, 1});
  const Solution sol{{{1, 2, 3}}};
  EXPECT_NEAR(evaluate(inst, sol), 3.2, 1e-12);
  EXPECT_TRUE(verify(inst, sol).has(ViolationCode::kDuration));
}

TEST(Verify, StructuralErrorsAreReportedNotThrown) {
  auto inst = hand_instance(kCVRP, {{0, 0}, {0.1, 0}, {0.2, 0}}, {1, 1});
  EXPECT_TRUE(verify(inst, Solution{{{1, 1}}}).has(ViolationCode::kDuplicate));
  EXPECT_TRUE(verify(inst, Solution{{{1}}}).has(ViolationCode::kMissing));
  EXPECT_TRUE(verify(inst, Solution{{{1, 7}, {2}}}).has(ViolationCode::kOutOfRange));
  EXPECT_TRUE(verify(inst, Solution{{{1, 2}, {}}}).has(ViolationCode::kEmptyRoute));
}

TEST(Verify, CapacityPerAccumulator) {
  auto inst = hand_instance(kVRPB, {{0, 0}, {0.1, 0}, {0.2, 0}, {0.3, 0}}, {6, -6, 5});
  inst.capacity = 10;
  EXPECT_TRUE(verify(inst, Solution{{{1, 2, 3}}}).has(ViolationCode::kCapacity));
  EXPECT_TRUE(verify(inst, Solution{{{1, 2}, {3}}}).feasible);
}

TEST(Construct, SingleCustomer) {
  auto inst = hand_instance(kCVRP, {{0, 0}, {0.5, 0.5}}, {4});
  Rng rng(0);
  const Construction c = construct(inst, uniform_policy(), rng);
  EXPECT_EQ(c.solution.routes, (std::vector<Route>{{1}}));
}

TEST(Construct, GreedySoftmaxOfNegatedDistanceIsNearestNeighbor) {
  const StepPolicy soft = [](const Instance& inst, const DecodeState& s) {
    const FeasibilityMask m = feasibility_mask(inst, s);
    std::vector<double> p(inst.num_nodes(), 0.0);
    double z = 0;
    for (int j = 0; j < inst.num_nodes(); ++j) {
      if (m.allowed[j]) z += p[j] = std::exp(-inst.distance(s.last, j));
    }
    for (double& x : p) x /= z;
    return p;
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = data::generate_instance(kCVRP, 6, seed);
    Rng rng(0);
    EXPECT_EQ(construct(inst, soft, rng).solution, testing::nearest_neighbor(inst));
  }
}

TEST(Construct, GreedyTieGoesToLowestIndex) {
  Rng rng(0);
  EXPECT_EQ(select_action({0.0, 0.25, 0.5, 0.25, 0.5}, DecodeMode::kGreedy, rng), 2);
}

TEST(Construct, MassOnMaskedNodeIsContractViolation) {
  auto inst = hand_instance(kCVRP, {{0, 0}, {0.5, 0}, {0.2, 0}}, {1, 1});
  const StepPolicy bad = [](const Instance& i, const DecodeState&) {
    return std::vector<double>(i.num_nodes(), 1.0 / i.num_nodes());
  };
  Rng rng(0);
  EXPECT_THROW(construct(inst, bad, rng), ContractViolation);
}

TEST(Construct, TraceRecordsEveryStep) {
  auto inst = data::generate_instance(kVRPTW, 8, 4);
  Rng rng(2);
  const Construction c = construct(inst, uniform_policy(), rng,
                                   {DecodeMode::kSample, true, -1});
  ASSERT_EQ(c.trace.size(), c.actions.size());
  for (const auto& step : c.trace) {
    double total = 0;
    for (std::size_t j = 0; j < step.probs.size(); ++j) {
      total += step.probs[j];
      if (!step.mask.allowed[j]) EXPECT_EQ(step.probs[j], 0.0);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Construct, ForcedFirstAction) {
  auto inst = data::generate_instance(kCVRP, 6, 1);
  Rng rng(0);
  const Construction c = construct(inst, uniform_policy(), rng, {DecodeMode::kSample, false, 4});
  EXPECT_EQ(c.actions.front(), 4);
}

// Random masked rollouts over every variant stay feasible and never strand.
TEST(Property, MaskedRolloutsAreFeasible) {
  int runs = 0;
  for (const auto& v : all_variants()) {
    for (int n : {5, 20}) {
      for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto inst = data::generate_instance(v, n, 1000 + seed);
        Rng rng(seed);
        const Construction c = construct(inst, uniform_policy(), rng, {DecodeMode::kSample});
        const VerifyReport rep = verify(inst, c.solution);
        ASSERT_TRUE(rep.feasible) << v.name() << " n=" << n << " seed=" << seed;
        ++runs;
      }
    }
  }
  EXPECT_EQ(runs, 16 * 2 * 15);
}

bool replays_under_mask(const Instance& inst, const Solution& sol) {
  DecodeState s = initial_state(inst);
  for (const auto& r : sol.routes) {
    for (int c : r) {
      if (!feasibility_mask(inst, s).allowed[c]) return false;
      apply_action(inst, s, c);
    }
    if (s.done) break;
    if (!feasibility_mask(inst, s).allowed[0]) return false;
    apply_action(inst, s, 0);
  }
  return true;
}

TEST(Property, VerifyAndMaskAgree) {
  Rng rng(77);
  int feasible = 0, infeasible = 0;
  for (const auto& v : all_variants()) {
    for (int trial = 0; trial < 60; ++trial) {
      auto inst = data::generate_instance(v, 8, rng.next_u64());
      std::vector<int> perm(8);
      for (int i = 0; i < 8; ++i) perm[i] = i + 1;
      rng.shuffle(perm);
      Solution sol;
      for (int c : perm) {
        if (sol.routes.empty() || rng.uniform() < 0.3) sol.routes.emplace_back();
        sol.routes.back().push_back(c);
      }
      const bool ok = verify(inst, sol).feasible;
      EXPECT_EQ(replays_under_mask(inst, sol), ok) << v.name() << " " << sol.giant_tour();
      (ok ? feasible : infeasible)++;
    }
  }
  EXPECT_GT(feasible, 50);
  EXPECT_GT(infeasible, 50);
}

TEST(Property, EvaluateMatchesEnumerationOracleSolution) {
  auto inst = data::generate_instance(kCVRP, 8, 2024);
  const auto best = testing::enumerate_optimum(inst);
  ASSERT_FALSE(best.solution.routes.empty());
  EXPECT_TRUE(verify(inst, best.solution).feasible);
  EXPECT_NEAR(evaluate(inst, best.solution), best.cost, 1e-9);
}

}  // namespace
}  // namespace mtlkd
