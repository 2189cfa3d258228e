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

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coinsel/advanced.hpp"
#include "coinsel/basic.hpp"
#include "coinsel/domain.hpp"
#include "coinsel/primitive.hpp"
#include "coinsel/rng.hpp"

namespace coinsel {

enum class AlgorithmId {
  kFifo, kLifo, kHvf, kLvf, kHpf,
  kGreedy, kRandomDraw, kRandomImprove, kKnapsack, kBnb,
  kIlp, kLeverage, kMyopic, kStrategic, kGenetic,
};

inline constexpr std::array<std::pair<AlgorithmId, std::string_view>, 15> kAlgorithmNames{{
    {AlgorithmId::kFifo, "fifo"},
    {AlgorithmId::kLifo, "lifo"},
    {AlgorithmId::kHvf, "hvf"},
    {AlgorithmId::kLvf, "lvf"},
    {AlgorithmId::kHpf, "hpf"},
    {AlgorithmId::kGreedy, "greedy"},
    {AlgorithmId::kRandomDraw, "randomdraw"},
    {AlgorithmId::kRandomImprove, "randomimprove"},
    {AlgorithmId::kKnapsack, "knapsack"},
    {AlgorithmId::kBnb, "bnb"},
    {AlgorithmId::kIlp, "ilp"},
    {AlgorithmId::kLeverage, "leverage"},
    {AlgorithmId::kMyopic, "myopic"},
    {AlgorithmId::kStrategic, "strategic"},
    {AlgorithmId::kGenetic, "genetic"},
}};

inline std::optional<AlgorithmId> ParseAlgorithm(std::string_view name) {
  for (const auto& [id, n] : kAlgorithmNames) {
    if (n == name) return id;
  }
  return std::nullopt;
}

inline std::string_view AlgorithmName(AlgorithmId id) {
  for (const auto& [i, n] : kAlgorithmNames) {
    if (i == id) return n;
  }
  return "unknown";
}

inline bool IsAdvanced(AlgorithmId id) { return id >= AlgorithmId::kIlp; }

// Selectors that account for fees themselves; the simulator tops up the
// target for the others.
inline bool IsFeeAware(AlgorithmId id) {
  return id == AlgorithmId::kBnb || id == AlgorithmId::kIlp || id == AlgorithmId::kLeverage;
}

struct AlgorithmConfig {
  AlgorithmId id = AlgorithmId::kHvf;
  std::int64_t rounds = 1000;
  unsigned repeats = kDefaultKnapsackRepeats;
  std::size_t max_inputs = 100;
  Amount min_change{0};
  BranchPolicy branch_policy = BranchPolicy::kRandomized;
  double gamma = 0.5;
  double lambda = 0.5;
  std::size_t population = 50;
  std::size_t generations = 200;
  double crossover_prob = 0.8;
  double mutation_prob = 0.02;
  Amount t2{0};  // second-period target; 0 means "same as the first"
  // Advanced selectors see at most this many of the largest utxos plus as
  // many random others.
  std::size_t window_largest = 10;
  std::size_t window_random = 10;
};

using Selector = std::function<SelectionResult(const UtxoPool&, Amount, RngSeed)>;

namespace detail {

// The largest `largest` utxos plus `random` others drawn with `rng`.
inline UtxoPool CandidateWindow(const UtxoPool& pool, std::size_t largest, std::size_t random,
                                Rng& rng) {
  if (pool.size() <= largest + random) return pool;
  auto order = PolicyOrder(pool, SortPolicy::Hvf());
  UtxoPool window;
  for (std::size_t i = 0; i < largest; ++i) window.add(*order[i]);
  for (std::size_t k = 0; k < random; ++k) {
    std::size_t j = largest + k + rng.index(order.size() - largest - k);
    std::swap(order[largest + k], order[j]);
    window.add(*order[largest + k]);
  }
  return window;
}

// Second-period target for the two-period selectors inside a simulation:
// the configured one (or `t` itself) capped at what stays in the window
// after paying `t`. Empty when nothing would stay.
inline std::optional<Amount> SecondTarget(const UtxoPool& window, Amount t, Amount configured) {
  if (window.total_value() <= t) return std::nullopt;
  const Amount left = window.total_value() - t;
  const Amount want = configured.is_zero() ? t : configured;
  return want < left ? want : left;
}

}  // namespace detail

// Single-target selector for `config`. Advanced selectors run on a
// candidate window because their exact backend caps the instance size.
inline Selector MakeSelector(const AlgorithmConfig& config, const FeeParams& fee) {
  const AlgorithmConfig c = config;
  switch (c.id) {
    case AlgorithmId::kFifo:
      return [](const UtxoPool& p, Amount t, RngSeed) { return select_primitive(p, t, SortPolicy::Fifo()); };
    case AlgorithmId::kLifo:
      return [](const UtxoPool& p, Amount t, RngSeed) { return select_primitive(p, t, SortPolicy::Lifo()); };
    case AlgorithmId::kHvf:
      return [](const UtxoPool& p, Amount t, RngSeed) { return select_primitive(p, t, SortPolicy::Hvf()); };
    case AlgorithmId::kLvf:
      return [](const UtxoPool& p, Amount t, RngSeed) { return select_primitive(p, t, SortPolicy::Lvf()); };
    case AlgorithmId::kHpf:
      return [](const UtxoPool& p, Amount t, RngSeed) { return select_primitive(p, t, SortPolicy::Hpf()); };
    case AlgorithmId::kGreedy:
      return [](const UtxoPool& p, Amount t, RngSeed) { return select_greedy(p, t); };
    case AlgorithmId::kRandomDraw:
      return [](const UtxoPool& p, Amount t, RngSeed s) { return select_random_draw(p, t, s); };
    case AlgorithmId::kRandomImprove:
      return [c](const UtxoPool& p, Amount t, RngSeed s) {
        return select_random_improve(p, t, c.max_inputs, s);
      };
    case AlgorithmId::kKnapsack:
      return [c](const UtxoPool& p, Amount t, RngSeed s) { return select_knapsack(p, t, c.repeats, s); };
    case AlgorithmId::kBnb:
      return [c, fee](const UtxoPool& p, Amount t, RngSeed s) {
        return select_bnb(p, t, BnbParams{c.rounds, c.min_change, c.branch_policy, fee}, s);
      };
    case AlgorithmId::kIlp:
      return [c, fee](const UtxoPool& p, Amount t, RngSeed s) {
        Rng rng(s);
        auto window = detail::CandidateWindow(p, c.window_largest, c.window_random, rng);
        return select_ilp_two_phase(window, PayRequestSet{t}, IlpParams{fee, c.gamma}).selection;
      };
    case AlgorithmId::kLeverage:
      return [c, fee](const UtxoPool& p, Amount t, RngSeed s) {
        Rng rng(s);
        LeverageProblem problem{detail::CandidateWindow(p, c.window_largest, c.window_random, rng),
                                PayRequestSet{t}, fee};
        return select_knapsack_leverage(problem).first.selection;
      };
    case AlgorithmId::kMyopic:
      return [c](const UtxoPool& p, Amount t, RngSeed s) {
        Rng rng(s);
        auto window = detail::CandidateWindow(p, c.window_largest, c.window_random, rng);
        const auto t2 = detail::SecondTarget(window, t, c.t2);
        if (!t2) return select_primitive(window, t, SortPolicy::Hvf());
        return select_myopic(window, t, *t2).first;
      };
    case AlgorithmId::kStrategic:
      return [c](const UtxoPool& p, Amount t, RngSeed s) {
        Rng rng(s);
        auto window = detail::CandidateWindow(p, c.window_largest, c.window_random, rng);
        const auto t2 = detail::SecondTarget(window, t, c.t2);
        if (!t2) return select_primitive(window, t, SortPolicy::Hvf());
        return select_strategic(window, StrategicParams{c.lambda, t, *t2}).first;
      };
    case AlgorithmId::kGenetic:
      return [c](const UtxoPool& p, Amount t, RngSeed s) {
        Rng rng(s);
        auto window = detail::CandidateWindow(p, c.window_largest, c.window_random, rng);
        GeneticParams g{c.population, c.generations, c.crossover_prob, c.mutation_prob, rng.derive(), {}};
        return select_greedy_genetic(window, t, g);
      };
  }
  throw SelectionError(ErrorCode::kInvalidArgument, "unknown algorithm");
}

}  // namespace coinsel
