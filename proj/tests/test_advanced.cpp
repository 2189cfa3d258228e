// Copyright 2026 The coinsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "test_support.hpp"

namespace coinsel {
namespace {

using testing::PoolOf;
using testing::ValueBag;
using testing::ValuesOfIds;
using testing::IlpByEnumeration;
using testing::MyopicByEnumeration;
using testing::StrategicByEnumeration;
using testing::RandomAddressedPool;

using Bag = std::multiset<std::uint64_t>;

// --- tx_size --------------------------------------------------------------

TEST(TxSizeTest, Examples) {
  const FeeParams fee;
  EXPECT_EQ(tx_size(1, 1, false, fee), 192u);
  EXPECT_EQ(tx_size(0, 0, false, fee), 10u);
  EXPECT_EQ(tx_size(2, 1, true, fee), 374u);
}

TEST(TxSizeTest, AffineInInputs) {
  const FeeParams fee;
  for (std::uint64_t a = 0; a < 30; ++a) {
    for (std::uint64_t b = 0; b < 4; ++b) {
      for (bool c : {false, true}) EXPECT_EQ(tx_size(a + 1, b, c, fee) - tx_size(a, b, c, fee), 148u);
    }
  }
}

// --- two-phase ILP --------------------------------------------------------


TEST(IlpTest, UniqueFeasiblePoint) {
  FeeParams fee;
  fee.fee_per_byte = Amount(2);
  const Amount t(5000);
  const Amount exact = t + fee.cost_of(tx_size(1, 1, false, fee));
  UtxoPool pool{{"a", exact}};
  const auto r = select_ilp_two_phase(pool, PayRequestSet{t}, IlpParams{fee, 0.5});
  EXPECT_EQ(r.selection.inputs, (std::vector<std::string>{"a"}));
  EXPECT_TRUE(r.selection.change_value.is_zero());
  EXPECT_FALSE(r.has_change);
  EXPECT_EQ(r.optimal_size, tx_size(1, 1, false, fee));
  EXPECT_EQ(r.size, r.optimal_size);
  EXPECT_EQ(r.selection.fee_paid, fee.cost_of(192));
  EXPECT_FALSE(CheckResult(pool, t, r.selection));
}

TEST(IlpTest, Infeasible) {
  FeeParams fee;
  fee.fee_per_byte = Amount(1);
  UtxoPool pool{{"a", Amount(100)}};
  try {
    select_ilp_two_phase(pool, PayRequestSet{Amount(90)}, IlpParams{fee, 0.5});
    FAIL();
  } catch (const SelectionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
  EXPECT_THROW(select_ilp_two_phase(pool, PayRequestSet{Amount(90)}, IlpParams{fee, 1.0}), SelectionError);
  EXPECT_THROW(select_ilp_two_phase(PoolOf(std::vector<std::uint64_t>(21, 5)), PayRequestSet{Amount(1)},
                                    IlpParams{FeeParams{}, 0.5}),
               SelectionError);
}

TEST(IlpTest, MatchesEnumeration) {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 120; ++trial) {
    const auto v = testing::RandomValues(gen, 1 + trial % 12, 1, 1000);
    const UtxoPool pool = PoolOf(v);
    std::uniform_int_distribution<std::uint64_t> t(1, pool.total_value().units());
    const Amount target(t(gen));
    FeeParams fee;
    fee.fee_per_byte = Amount(trial % 3 == 0 ? 1 : 0);
    const auto want = IlpByEnumeration(pool, target, fee, 0.5);
    if (!want) {
      EXPECT_THROW(select_ilp_two_phase(pool, PayRequestSet{target}, IlpParams{fee, 0.5}), SelectionError);
      continue;
    }
    const auto got = select_ilp_two_phase(pool, PayRequestSet{target}, IlpParams{fee, 0.5});
    EXPECT_EQ(static_cast<std::int64_t>(got.optimal_size), want->y_opt);
    EXPECT_EQ(got.selection.inputs.size(), want->phase2_inputs);
    EXPECT_LE(static_cast<double>(got.size), 1.5 * static_cast<double>(got.optimal_size));
    EXPECT_EQ(got.size, tx_size(got.selection.inputs.size(), 1, got.has_change, fee));
    EXPECT_FALSE(CheckResult(pool, target, got.selection));
    EXPECT_EQ(got.has_change, !got.selection.change_value.is_zero());
  }
}

TEST(IlpTest, SmallGammaKeepsMinimumSize) {
  std::mt19937_64 gen(103);
  for (int trial = 0; trial < 60; ++trial) {
    const UtxoPool pool = PoolOf(testing::RandomValues(gen, 8, 1, 1000));
    const Amount target(1 + gen() % pool.total_value().units());
    const auto r = select_ilp_two_phase(pool, PayRequestSet{target}, IlpParams{FeeParams{}, 0.01});
    EXPECT_EQ(r.size, r.optimal_size);
  }
}

TEST(IlpTest, PhaseTwoUsesAtLeastPhaseOneInputs) {
  std::mt19937_64 gen(107);
  for (int trial = 0; trial < 60; ++trial) {
    const UtxoPool pool = PoolOf(testing::RandomValues(gen, 10, 1, 1000));
    const Amount target(1 + gen() % pool.total_value().units());
    const auto tight = select_ilp_two_phase(pool, PayRequestSet{target}, IlpParams{FeeParams{}, 0.001});
    const auto loose = select_ilp_two_phase(pool, PayRequestSet{target}, IlpParams{FeeParams{}, 0.5});
    EXPECT_GE(loose.selection.inputs.size() - loose.has_change,
              tight.selection.inputs.size() - tight.has_change);
  }
}

// --- knapsack with leverage -----------------------------------------------

FeeParams LeverageFee() {
  FeeParams fee;
  fee.fee_per_byte = Amount(1);
  fee.dust_threshold = Amount(50);
  fee.max_overpay = Amount(20);
  return fee;
}

TEST(LeverageTest, ExactFitIsChangeFree) {
  const FeeParams fee = LeverageFee();
  const Amount t(1000);
  UtxoPool pool{{"a", t + fee.cost_of(tx_size(1, 1, false, fee))}};
  const auto r = select_knapsack_leverage({pool, PayRequestSet{t}, fee});
  EXPECT_EQ(r.kind, LeverageKind::kChangeFree);
  EXPECT_FALSE(r.second);
  EXPECT_TRUE(r.first.tip.is_zero());
  EXPECT_TRUE(r.first.selection.change_value.is_zero());
  EXPECT_FALSE(CheckResult(pool, t, r.first.selection));
}

TEST(LeverageTest, OverpaymentBecomesTip) {
  const FeeParams fee = LeverageFee();
  const Amount t(1000);
  for (std::uint64_t h = 1; h <= 20; ++h) {
    UtxoPool pool{{"a", t + fee.cost_of(tx_size(1, 1, false, fee)) + Amount(h)}};
    const auto r = select_knapsack_leverage({pool, PayRequestSet{t}, fee});
    EXPECT_EQ(r.kind, LeverageKind::kChangeFree);
    EXPECT_EQ(r.first.tip.units(), h);
    EXPECT_FALSE(CheckResult(pool, t, r.first.selection));
  }
}

TEST(LeverageTest, ConstructedLeveragePair) {
  // One utxo of 2000 pays 1000 with change; that change plus a 300 utxo
  // pays a pending request of 900 exactly.
  const FeeParams fee = LeverageFee();
  const Amount t1(1000);
  const std::uint64_t w1 = tx_size(1, 1, true, fee);  // 226
  const Amount c1 = Amount(2000) - t1 - fee.cost_of(w1);
  const std::uint64_t w2 = tx_size(2, 1, false, fee);
  const Amount t2 = c1 + Amount(300) - fee.cost_of(w2);
  UtxoPool pool{{"big", Amount(2000)}, {"small", Amount(300)}};
  LeverageProblem problem{pool, PayRequestSet{t1, t2}, fee};
  ASSERT_GT(t1, t2);
  const auto r = select_knapsack_leverage(problem);
  ASSERT_EQ(r.kind, LeverageKind::kLeveraged);
  ASSERT_TRUE(r.second);
  // Moving a utxo between the two transactions changes neither the bytes
  // nor the total spend, so either split is optimal.
  std::set<std::string> both(r.first.selection.inputs.begin(), r.first.selection.inputs.end());
  both.insert(r.second->selection.inputs.begin(), r.second->selection.inputs.end());
  EXPECT_EQ(both, (std::set<std::string>{"big", "small"}));
  EXPECT_EQ(r.first.selection.inputs.size() + r.second->selection.inputs.size(), 2u);
  EXPECT_TRUE(r.second->selection.change_value.is_zero());
  EXPECT_TRUE(r.second->tip.is_zero());
  EXPECT_EQ(r.second->carried_change, r.first.selection.change_value);
  EXPECT_GE(r.first.selection.change_value, fee.dust_threshold);
  EXPECT_FALSE(CheckResult(pool, t1, r.first.selection));
  const Amount c1_actual = r.second->carried_change;
  EXPECT_FALSE(CheckResult(pool, t2, r.second->selection, c1_actual));
}

TEST(LeverageTest, FallbackKeepsChangeAboveDust) {
  const FeeParams fee = LeverageFee();
  UtxoPool pool{{"a", Amount(5000)}, {"b", Amount(7000)}};
  const auto r = select_knapsack_leverage({pool, PayRequestSet{Amount(1000)}, fee});
  EXPECT_EQ(r.kind, LeverageKind::kFallback);
  EXPECT_EQ(r.first.selection.inputs, (std::vector<std::string>{"a"}));
  EXPECT_GE(r.first.selection.change_value, fee.dust_threshold);
  EXPECT_FALSE(CheckResult(pool, Amount(1000), r.first.selection));
}

TEST(LeverageTest, InfeasibleWhenPoolTooSmall) {
  UtxoPool pool{{"a", Amount(100)}};
  EXPECT_THROW(select_knapsack_leverage({pool, PayRequestSet{Amount(1000)}, LeverageFee()}), SelectionError);
}

// Independent 3^n search for the cheapest leverage pair.
std::optional<std::int64_t> CheapestPair(const UtxoPool& pool, Amount t1, Amount t2, const FeeParams& fee) {
  const auto m = pool.members();
  const std::size_t n = m.size();
  std::uint64_t states = 1;
  for (std::size_t i = 0; i < n; ++i) states *= 3;
  std::optional<std::int64_t> best;
  const std::int64_t a = ToSigned(fee.fee_per_byte);
  for (std::uint64_t code = 0; code < states; ++code) {
    std::int64_t v1 = 0, v2 = 0;
    std::uint64_t k1 = 0, k2 = 0;
    std::uint64_t c = code;
    for (std::size_t i = 0; i < n; ++i, c /= 3) {
      if (c % 3 == 1) v1 += ToSigned(m[i]->value), ++k1;
      if (c % 3 == 2) v2 += ToSigned(m[i]->value), ++k2;
    }
    if (k1 == 0) continue;
    const std::int64_t change = v1 - ToSigned(t1) - a * static_cast<std::int64_t>(tx_size(k1, 1, true, fee));
    if (change < ToSigned(fee.dust_threshold)) continue;
    const std::int64_t r2 =
        v2 + change - ToSigned(t2) - a * static_cast<std::int64_t>(tx_size(k2 + 1, 1, false, fee));
    if (r2 < 0 || r2 > ToSigned(fee.max_overpay)) continue;
    if (!best || v1 + v2 < *best) best = v1 + v2;
  }
  return best;
}

TEST(LeverageTest, PairMatchesExhaustiveSearch) {
  std::mt19937_64 gen(109);
  FeeParams fee = LeverageFee();
  fee.max_overpay = Amount(40);
  int leveraged = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const UtxoPool pool = PoolOf(testing::RandomValues(gen, 2 + trial % 7, 100, 3000));
    const Amount t1(500 + gen() % 2000);
    const Amount t2(100 + gen() % (t1.units() - 100));
    LeverageProblem problem{pool, PayRequestSet{t1, t2}, fee};
    LeverageResult r;
    try {
      r = select_knapsack_leverage(problem);
    } catch (const SelectionError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
      continue;
    }
    if (r.kind == LeverageKind::kChangeFree) continue;
    const auto want = CheapestPair(pool, t1, t2, fee);
    if (r.kind == LeverageKind::kFallback) {
      EXPECT_FALSE(want) << "trial " << trial;
      continue;
    }
    ++leveraged;
    ASSERT_TRUE(want);
    const auto spent = ToSigned(r.first.selection.input_value) + ToSigned(r.second->selection.input_value) -
                       ToSigned(r.second->carried_change);
    EXPECT_EQ(spent, *want) << "trial " << trial;
    EXPECT_TRUE(r.second->selection.change_value.is_zero());
    EXPECT_LE(r.second->tip, fee.max_overpay);
    EXPECT_GE(r.first.selection.change_value, fee.dust_threshold);
    EXPECT_FALSE(CheckResult(pool, t1, r.first.selection));
    EXPECT_FALSE(CheckResult(pool, t2, r.second->selection, r.second->carried_change));
  }
  EXPECT_GT(leveraged, 5);
}

// --- myopic ---------------------------------------------------------------

TEST(MyopicTest, Examples) {
  const UtxoPool four = PoolOf({40, 30, 20, 10});
  EXPECT_EQ(select_myopic(four, Amount(50), Amount(10)).first.inputs.size(), 2u);

  const UtxoPool two = PoolOf({100, 1});
  const auto r = select_myopic(two, Amount(50), Amount(30));
  EXPECT_EQ(ValuesOfIds(two, r.first.inputs), (std::vector<std::uint64_t>{100}));
  EXPECT_EQ(r.first.change_value.units(), 50u);
  EXPECT_TRUE(r.second_spends_change);
  EXPECT_TRUE(r.second.inputs.empty());
  EXPECT_EQ(r.second.input_value.units(), 50u);
  EXPECT_EQ(r.second.change_value.units(), 20u);

  const UtxoPool exact = PoolOf({50, 30});
  const auto e = select_myopic(exact, Amount(50), Amount(30));
  EXPECT_EQ(ValuesOfIds(exact, e.first.inputs), (std::vector<std::uint64_t>{50}));
  EXPECT_EQ(ValuesOfIds(exact, e.second.inputs), (std::vector<std::uint64_t>{30}));
  EXPECT_FALSE(e.second_spends_change);

  EXPECT_THROW(select_myopic(exact, Amount(50), Amount(0)), SelectionError);
  EXPECT_THROW(select_myopic(exact, Amount(50), Amount(31)), SelectionError);
}


TEST(MyopicTest, MatchesEnumeration) {
  std::mt19937_64 gen(113);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto v = testing::RandomValues(gen, 1 + trial % 16, 1, 1000);
    std::uint64_t total = 0;
    for (auto x : v) total += x;
    const std::uint64_t t1 = 1 + gen() % total;
    if (total == t1) continue;
    const std::uint64_t t2 = 1 + gen() % (total - t1);
    const UtxoPool pool = PoolOf(v);
    const auto got = select_myopic(pool, Amount(t1), Amount(t2));
    const auto want = MyopicByEnumeration(v, t1, t2);
    EXPECT_EQ(static_cast<int>(got.first.inputs.size()), want.first);
    EXPECT_EQ(static_cast<int>(got.second.inputs.size() + got.second_spends_change), want.second);
    EXPECT_FALSE(CheckResult(pool, Amount(t1), got.first));
    ++checked;
  }
  EXPECT_GT(checked, 250);
}

// --- strategic ------------------------------------------------------------


TEST(StrategicTest, MatchesEnumeration) {
  std::mt19937_64 gen(127);
  for (int trial = 0; trial < 90; ++trial) {
    const UtxoPool pool = RandomAddressedPool(gen, 1 + trial % 9);
    const std::uint64_t total = pool.total_value().units();
    const std::uint64_t t1 = 1 + gen() % total;
    const std::uint64_t t2 = 1 + gen() % total;
    for (double lambda : {0.0, 0.3, 0.5, 1.0}) {
      const auto want = StrategicByEnumeration(pool, lambda, t1, t2);
      if (!want) {
        EXPECT_THROW(select_strategic(pool, {lambda, Amount(t1), Amount(t2)}), SelectionError);
        continue;
      }
      const auto got = select_strategic(pool, {lambda, Amount(t1), Amount(t2)});
      EXPECT_NEAR(got.objective, *want, 1e-9) << "trial " << trial << " lambda " << lambda;
      EXPECT_FALSE(CheckResult(pool, Amount(t1), got.first));
      const Amount carried = got.second_spends_change ? got.first.change_value : Amount(0);
      EXPECT_FALSE(CheckResult(pool, Amount(t2), got.second, carried));
      for (const auto& id : got.second.inputs) {
        EXPECT_EQ(std::count(got.first.inputs.begin(), got.first.inputs.end(), id), 0);
      }
    }
  }
}

TEST(StrategicTest, DisjointHalvesAvoidLinking) {
  UtxoPool pool{{"a", Amount(60), 148, 0, "x"}, {"b", Amount(50), 148, 0, "x"},
                {"c", Amount(55), 148, 0, "y"}, {"d", Amount(45), 148, 0, "y"}};
  const auto r = select_strategic(pool, {1.0, Amount(100), Amount(100)});
  EXPECT_DOUBLE_EQ(r.objective, 0.0);
  EXPECT_FALSE(r.linked);
  EXPECT_EQ(r.union_size, 4u);
}

TEST(StrategicTest, SingletonTargets) {
  UtxoPool pool{{"a", Amount(70), 148, 0, "x"}, {"b", Amount(40), 148, 0, "y"}};
  for (double lambda : {0.0, 0.25, 0.75}) {
    const auto r = select_strategic(pool, {lambda, Amount(70), Amount(40)});
    EXPECT_EQ(r.first.inputs, (std::vector<std::string>{"a"}));
    EXPECT_EQ(r.second.inputs, (std::vector<std::string>{"b"}));
    EXPECT_DOUBLE_EQ(r.objective, (1 - lambda) * 2);
  }
}

TEST(StrategicTest, LambdaZeroIsMinimumJointCardinality) {
  // With lambda = 0 spending the change is free of penalty.
  const UtxoPool pool = PoolOf({100, 10, 10, 10});
  const auto r = select_strategic(pool, {0.0, Amount(50), Amount(30)});
  EXPECT_EQ(r.union_size, 2u);
  EXPECT_TRUE(r.second_spends_change);
  EXPECT_THROW(select_strategic(pool, {1.5, Amount(50), Amount(30)}), SelectionError);
}

// --- genetic --------------------------------------------------------------

double FitnessOf(const std::vector<std::uint64_t>& values, std::uint64_t target) {
  std::vector<Amount> a;
  for (auto v : values) a.push_back(Amount(v));
  return fitness(a, Amount(target));
}

TEST(FitnessTest, Examples) {
  EXPECT_DOUBLE_EQ(FitnessOf({20, 30}, 40), 1.0 / 12);
  EXPECT_DOUBLE_EQ(FitnessOf({40}, 40), 1.0);
  EXPECT_DOUBLE_EQ(FitnessOf({25, 20, 20, 10, 5}, 40), 1.0 / 45);
  EXPECT_THROW(FitnessOf({}, 40), SelectionError);
  EXPECT_THROW(FitnessOf({10}, 40), SelectionError);
}

TEST(GeneticTest, SpecialCases) {
  GeneticParams params;
  const UtxoPool two = PoolOf({100, 30});
  EXPECT_EQ(ValuesOfIds(two, select_greedy_genetic(two, Amount(50), params).inputs),
            (std::vector<std::uint64_t>{100}));
  const UtxoPool three = PoolOf({10, 20, 30});
  EXPECT_EQ(ValueBag(three, select_greedy_genetic(three, Amount(60), params).inputs), (Bag{10, 20, 30}));
  const UtxoPool covers = PoolOf({100, 70, 90, 20});
  EXPECT_EQ(ValuesOfIds(covers, select_greedy_genetic(covers, Amount(65), params).inputs),
            (std::vector<std::uint64_t>{70}));
  EXPECT_THROW(select_greedy_genetic(three, Amount(61), params), SelectionError);
  params.population = 1;
  EXPECT_THROW(select_greedy_genetic(PoolOf({5, 5}), Amount(8), params), SelectionError);
}

TEST(GeneticTest, FindsWorkedExampleOptimum) {
  const UtxoPool pool = PoolOf({25, 20, 20, 10, 5});
  int found = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    GeneticParams params;
    params.seed = RngSeed{s};
    const auto r = select_greedy_genetic(pool, Amount(40), params);
    const double f = FitnessOf(ValuesOfIds(pool, r.inputs), 40);
    EXPECT_GE(f, 1.0 / 3);
    found += ValueBag(pool, r.inputs) == Bag{20, 20};
  }
  EXPECT_GE(found, 90);
}

TEST(GeneticTest, GenerationsStayFeasibleAndBestNeverWorsens) {
  std::mt19937_64 gen(131);
  for (std::uint64_t s = 0; s < 40; ++s) {
    const UtxoPool pool = PoolOf(testing::RandomValues(gen, 15, 1, 1000));
    const Amount target(pool.total_value().units() / 2);
    std::vector<GenerationReport> reports;
    GeneticParams params;
    params.generations = 60;
    params.seed = RngSeed{s};
    params.observer = [&](const GenerationReport& r) { reports.push_back(r); };
    const auto r = select_greedy_genetic(pool, target, params);
    ASSERT_FALSE(reports.empty());
    EXPECT_LE(reports.size(), params.generations);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      EXPECT_TRUE(reports[i].all_feasible);
      EXPECT_EQ(reports[i].generation, i);
      EXPECT_EQ(reports[i].evaluated, params.population);
      if (i > 0) {
        EXPECT_LE(reports[i].best_denominator, reports[i - 1].best_denominator);
      }
    }
    const double f = FitnessOf(ValuesOfIds(pool, r.inputs), target.units());
    EXPECT_DOUBLE_EQ(f, 1.0 / static_cast<double>(reports.back().best_denominator));
    const double greedy = FitnessOf(ValuesOfIds(pool, select_greedy(pool, target).inputs), target.units());
    EXPECT_GE(f, greedy);
    EXPECT_EQ(r, select_greedy_genetic(pool, target, params));
  }
}

}  // namespace
}  // namespace coinsel
