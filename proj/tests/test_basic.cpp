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

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "test_support.hpp"

namespace coinsel {
namespace {

using testing::PoolOf;
using testing::ValueBag;
using testing::ValuesOfIds;

using Bag = std::multiset<std::uint64_t>;

// --- greedy ---------------------------------------------------------------

TEST(GreedyTest, WorkedExample) {
  const UtxoPool pool = PoolOf({25, 20, 20, 10, 5});
  const auto r = select_greedy(pool, Amount(40));
  EXPECT_EQ(ValuesOfIds(pool, r.inputs), (std::vector<std::uint64_t>{25, 10, 5}));
  EXPECT_TRUE(r.change_value.is_zero());
  EXPECT_TRUE(r.exact_match);
}

TEST(GreedyTest, FallsBackToSmallest) {
  const UtxoPool pool = PoolOf({100});
  const auto r = select_greedy(pool, Amount(40));
  EXPECT_EQ(ValuesOfIds(pool, r.inputs), (std::vector<std::uint64_t>{100}));
  EXPECT_EQ(r.change_value.units(), 60u);
}

TEST(GreedyTest, FallbackAddsSmallestRemainingUntilCovered) {
  // First pass takes 30 (remain 5); 40 is too large, so the fallback
  // adds the smallest unselected utxo, 40 itself.
  const UtxoPool pool = PoolOf({40, 30});
  const auto r = select_greedy(pool, Amount(35));
  EXPECT_EQ(ValuesOfIds(pool, r.inputs), (std::vector<std::uint64_t>{30, 40}));
}

TEST(GreedyTest, InsufficientFunds) {
  EXPECT_THROW(select_greedy(PoolOf({1, 2}), Amount(4)), SelectionError);
}

TEST(GreedyTest, FirstPassNeverOvershootsRemaining) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto v = testing::RandomValues(gen, 1 + trial % 20, 1, 100);
    const UtxoPool pool = PoolOf(v);
    std::uniform_int_distribution<std::uint64_t> t(1, pool.total_value().units());
    const Amount target(t(gen));
    const auto r = select_greedy(pool, target);
    ASSERT_FALSE(CheckResult(pool, target, r));
    // Replay the first pass: values are non-increasing and each fits.
    std::uint64_t remain = target.units();
    std::uint64_t prev = UINT64_MAX;
    std::size_t i = 0;
    for (; i < r.inputs.size(); ++i) {
      const std::uint64_t x = pool.find(r.inputs[i])->value.units();
      if (x > remain || x > prev) break;
      remain -= x;
      prev = x;
    }
    // Whatever follows the first pass is ascending.
    for (std::size_t j = i + 1; j < r.inputs.size(); ++j) {
      EXPECT_LE(pool.find(r.inputs[j - 1])->value, pool.find(r.inputs[j])->value);
    }
  }
}

// --- random draw ----------------------------------------------------------

TEST(RandomDrawTest, Examples) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const UtxoPool one = PoolOf({100});
    EXPECT_EQ(select_random_draw(one, Amount(50), RngSeed{s}).inputs, (std::vector<std::string>{"u00"}));
    const UtxoPool three = PoolOf({10, 10, 10});
    EXPECT_EQ(select_random_draw(three, Amount(25), RngSeed{s}).inputs.size(), 3u);
  }
}

TEST(RandomDrawTest, ReplayIsIdentical) {
  std::mt19937_64 gen(8);
  const UtxoPool pool = PoolOf(testing::RandomValues(gen, 50, 1, 1000));
  const auto a = select_random_draw(pool, Amount(5000), RngSeed{77});
  const auto b = select_random_draw(pool, Amount(5000), RngSeed{77});
  EXPECT_EQ(a, b);
  EXPECT_FALSE(CheckResult(pool, Amount(5000), a));
}

TEST(RandomDrawTest, StopsAsSoonAsCovered) {
  std::mt19937_64 gen(9);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const UtxoPool pool = PoolOf(testing::RandomValues(gen, 30, 1, 1000));
    const Amount target(4000);
    const auto r = select_random_draw(pool, target, RngSeed{s});
    ASSERT_FALSE(CheckResult(pool, target, r));
    EXPECT_LT(r.input_value - pool.find(r.inputs.back())->value, target);
  }
}

TEST(RandomDrawTest, DrawsAreRoughlyUniform) {
  const UtxoPool pool = PoolOf({10, 10, 10, 10, 10});
  std::map<std::string, int> first;
  constexpr int kTrials = 20000;
  for (std::uint64_t s = 0; s < kTrials; ++s) ++first[select_random_draw(pool, Amount(1), RngSeed{s}).inputs[0]];
  // Each id is first with probability 1/5; 5 sigma of a binomial(20000, 0.2).
  for (const auto& [id, n] : first) EXPECT_NEAR(n, kTrials / 5, 5 * 56.6) << id;
}

// --- random improve -------------------------------------------------------

TEST(RandomImproveTest, SingletonExact) {
  const auto r = select_random_improve(PoolOf({10}), Amount(10), 5, RngSeed{1});
  EXPECT_EQ(r.inputs.size(), 1u);
  EXPECT_TRUE(r.exact_match);
}

TEST(RandomImproveTest, TieIsNotAnImprovement) {
  // Phase 1 ends at 16; the next draw would reach 24, which is as far from
  // 20 as 16 is, so phase 2 stops.
  const UtxoPool pool = PoolOf({8, 8, 8, 8});
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = select_random_improve(pool, Amount(10), 4, RngSeed{s});
    EXPECT_EQ(r.input_value.units(), 16u);
  }
}

TEST(RandomImproveTest, ImprovesTowardTwiceTarget) {
  const UtxoPool pool = PoolOf({6, 6, 6, 6});
  for (std::uint64_t s = 0; s < 50; ++s) {
    // 12 after phase 1; 18 is closer to 20; 24 is farther.
    const auto r = select_random_improve(pool, Amount(10), 4, RngSeed{s});
    EXPECT_EQ(r.input_value.units(), 18u);
  }
}

TEST(RandomImproveTest, MaxInputsLimits) {
  const UtxoPool pool = PoolOf({6, 6, 6, 6});
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_EQ(select_random_improve(pool, Amount(10), 2, RngSeed{s}).input_value.units(), 12u);
  }
  try {
    select_random_improve(pool, Amount(20), 2, RngSeed{0});
    FAIL();
  } catch (const SelectionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMaxInputsExceeded);
  }
  EXPECT_THROW(select_random_improve(pool, Amount(10), 0, RngSeed{0}), SelectionError);
}

TEST(RandomImproveTest, Properties) {
  std::mt19937_64 gen(21);
  for (std::uint64_t s = 0; s < 300; ++s) {
    const UtxoPool pool = PoolOf(testing::RandomValues(gen, 1 + s % 30, 1, 500));
    std::uniform_int_distribution<std::uint64_t> t(1, pool.total_value().units());
    const Amount target(t(gen));
    SelectionResult r;
    try {
      r = select_random_improve(pool, target, 100, RngSeed{s});
    } catch (const SelectionError& e) {
      ASSERT_EQ(e.code(), ErrorCode::kMaxInputsExceeded);
      continue;
    }
    ASSERT_FALSE(CheckResult(pool, target, r));
    EXPECT_EQ(r, select_random_improve(pool, target, 100, RngSeed{s}));
    // Phase 2 never pushes past 3T unless phase 1 already did.
    const auto phase1 = select_random_draw(pool, target, RngSeed{s});
    EXPECT_EQ(std::vector<std::string>(r.inputs.begin(), r.inputs.begin() + phase1.inputs.size()),
              phase1.inputs);
    if (r.inputs.size() > phase1.inputs.size()) {
      EXPECT_LE(r.input_value, target * 3);
      EXPECT_LT(AbsDiff(target * 2, r.input_value), AbsDiff(target * 2, phase1.input_value));
    }
  }
}

// --- knapsack -------------------------------------------------------------

TEST(KnapsackTest, Examples) {
  const auto one = select_knapsack(PoolOf({60}), Amount(60), 10, RngSeed{1});
  EXPECT_EQ(one.inputs.size(), 1u);
  EXPECT_TRUE(one.exact_match);
  const UtxoPool four = PoolOf({40, 30, 20, 10});
  const auto all = select_knapsack(four, Amount(100), 10, RngSeed{1});
  EXPECT_EQ(ValueBag(four, all.inputs), (Bag{40, 30, 20, 10}));
  EXPECT_TRUE(all.change_value.is_zero());
  EXPECT_THROW(select_knapsack(four, Amount(101), 10, RngSeed{1}), SelectionError);
  EXPECT_THROW(select_knapsack(four, Amount(10), 0, RngSeed{1}), SelectionError);
}

TEST(KnapsackTest, NeverBeatsExhaustiveOvershoot) {
  std::mt19937_64 gen(31);
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto v = testing::RandomValues(gen, 1 + s % 12, 1, 1000);
    const UtxoPool pool = PoolOf(v);
    std::uniform_int_distribution<std::uint64_t> t(1, pool.total_value().units());
    const Amount target(t(gen));
    const auto r = select_knapsack(pool, target, 200, RngSeed{s});
    ASSERT_FALSE(CheckResult(pool, target, r));
    EXPECT_GE(r.input_value.units(), *testing::BruteMinOvershoot(v, target.units()));
    EXPECT_EQ(r, select_knapsack(pool, target, 200, RngSeed{s}));
  }
}

TEST(KnapsackTest, PlantedMatchIsUsuallyFound) {
  std::mt19937_64 gen(41);
  int found = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto v = testing::RandomValues(gen, 12, 1, 1000);
    std::uint64_t mask = 0;
    while (testing::MaskCount(mask) < 2) mask = gen() & 0xFFF;
    const Amount target(testing::MaskSum(v, mask));
    const UtxoPool pool = PoolOf(v);
    const auto r = select_knapsack(pool, target, 1000, RngSeed{s});
    EXPECT_GE(r.input_value, target);
    found += r.exact_match ? 1 : 0;
  }
  EXPECT_GE(found, 95);
}

// --- branch and bound -----------------------------------------------------

BnbParams ZeroFee(BranchPolicy policy = BranchPolicy::kInclusionFirst) {
  return BnbParams{1000, Amount(0), policy, FeeParams{}};
}

TEST(BnbTest, ExactSubsetWithZeroFees) {
  const UtxoPool pool = PoolOf({10, 20, 30, 40});
  const auto r = select_bnb(pool, Amount(60), ZeroFee(), RngSeed{1});
  EXPECT_TRUE(r.exact_match);
  EXPECT_EQ(r.input_value.units(), 60u);
  const Bag got = ValueBag(pool, r.inputs);
  EXPECT_TRUE(got == (Bag{20, 40}) || got == (Bag{10, 20, 30}));
}

TEST(BnbTest, SingleExact) {
  const auto r = select_bnb(PoolOf({60}), Amount(60), ZeroFee(), RngSeed{1});
  EXPECT_TRUE(r.exact_match);
  EXPECT_EQ(r.inputs.size(), 1u);
}

TEST(BnbTest, FallbackWhenNoMatch) {
  const UtxoPool pool = PoolOf({50, 50});
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto r = select_bnb(pool, Amount(60), ZeroFee(BranchPolicy::kRandomized), RngSeed{s});
    EXPECT_EQ(r.inputs.size(), 2u);
    EXPECT_EQ(r.change_value.units(), 40u);
    EXPECT_FALSE(r.exact_match);
  }
}

TEST(BnbTest, WindowConstants) {
  FeeParams fee;
  fee.fee_per_byte = Amount(2);
  const BnbWindow w = BnbWindow::For(Amount(1000), fee);
  EXPECT_EQ(w.target_for_match, 1000 + 2 * 10 + 2 * 34);
  EXPECT_EQ(w.match_range, 2 * 148 + 2 * 34);
}

TEST(BnbTest, SkipsNegativeEffectiveValue) {
  FeeParams fee;
  fee.fee_per_byte = Amount(1);
  // 100 has effective value -48 and can never be used.
  UtxoPool pool{{"a", Amount(100)}, {"b", Amount(2000)}};
  const auto r = select_bnb(pool, Amount(1000), BnbParams{1000, Amount(0), BranchPolicy::kInclusionFirst, fee},
                            RngSeed{1});
  EXPECT_EQ(r.inputs, (std::vector<std::string>{"b"}));
  EXPECT_FALSE(CheckResult(pool, Amount(1000), r));
  EXPECT_THROW(select_bnb(UtxoPool{{"a", Amount(100)}}, Amount(1), BnbParams{1000, Amount(0),
                                                                            BranchPolicy::kInclusionFirst, fee},
                          RngSeed{1}),
               SelectionError);
}

TEST(BnbTest, MatchWithFeesStaysInWindow) {
  FeeParams fee;
  fee.fee_per_byte = Amount(1);
  std::mt19937_64 gen(51);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const UtxoPool pool = PoolOf(testing::RandomValues(gen, 10, 200, 3000));
    const Amount target(3000 + s * 7);
    const BnbParams params{1000, Amount(500), BranchPolicy::kRandomized, fee};
    SelectionResult r;
    try {
      r = select_bnb(pool, target, params, RngSeed{s});
    } catch (const SelectionError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInsufficientFunds);
      continue;
    }
    ASSERT_FALSE(CheckResult(pool, target, r));
    const BnbWindow w = BnbWindow::For(target, fee);
    SignedAmount eff = 0;
    for (const auto& id : r.inputs) eff += effective_value(*pool.find(id), fee);
    if (r.exact_match) {  // the fallback always leaves min_change > 0
      EXPECT_GE(eff, w.target_for_match);
      EXPECT_LE(eff, w.upper());
    } else {
      EXPECT_GE(r.change_value, params.min_change);
    }
  }
}

TEST(BnbTest, InvalidArguments) {
  EXPECT_THROW(select_bnb(PoolOf({5}), Amount(0), ZeroFee(), RngSeed{1}), SelectionError);
  BnbParams p = ZeroFee();
  p.rounds = 0;
  EXPECT_THROW(select_bnb(PoolOf({5}), Amount(1), p, RngSeed{1}), SelectionError);
}

// --- shared properties ----------------------------------------------------

TEST(BasicSelectorsTest, ResultInvariantsOnRandomPools) {
  std::mt19937_64 gen(61);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const UtxoPool pool = PoolOf(testing::RandomValues(gen, 1 + s % 40, 1, 2000));
    std::uniform_int_distribution<std::uint64_t> t(1, pool.total_value().units());
    const Amount target(t(gen));
    const RngSeed seed{s};
    for (const auto& r : {select_greedy(pool, target), select_random_draw(pool, target, seed),
                          select_knapsack(pool, target, 50, seed),
                          select_bnb(pool, target, ZeroFee(BranchPolicy::kRandomized), seed)}) {
      ASSERT_FALSE(CheckResult(pool, target, r)) << *CheckResult(pool, target, r);
      EXPECT_GE(r.input_value, target);
    }
  }
}

}  // namespace
}  // namespace coinsel
