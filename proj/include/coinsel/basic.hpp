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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "coinsel/domain.hpp"
#include "coinsel/primitive.hpp"
#include "coinsel/rng.hpp"

namespace coinsel {

// Descending pass taking every utxo that still fits under the
// remaining target, then smallest-first until covered.
inline SelectionResult select_greedy(const UtxoPool& pool, Amount target) {
  detail::RequireValidTarget(pool, target);
  const auto order = PolicyOrder(pool, SortPolicy::Hvf());
  std::unordered_set<const Utxo*> taken;
  std::vector<const Utxo*> chosen;
  Amount remain = target;
  for (const Utxo* u : order) {
    if (remain.is_zero()) break;
    if (u->value <= remain) {
      taken.insert(u);
      chosen.push_back(u);
      remain -= u->value;
    }
  }
  if (!remain.is_zero()) {
    for (const Utxo* u : PolicyOrder(pool, SortPolicy::Lvf())) {
      if (taken.contains(u)) continue;
      chosen.push_back(u);
      if (u->value >= remain) break;
      remain -= u->value;
    }
  }
  return detail::FeeFreeResult(chosen, target);
}

namespace detail {

struct ValueCover {
  Amount goal;
  Amount sum;
  bool operator()() const { return sum >= goal; }
  void add(const Utxo* u) { sum += u->value; }
};

}  // namespace detail

// Uniform draws without replacement until the target is covered.
inline SelectionResult select_random_draw(const UtxoPool& pool, Amount target, RngSeed seed) {
  detail::RequireValidTarget(pool, target);
  Rng rng(seed);
  auto items = pool.members();
  detail::ValueCover cover{target, Amount(0)};
  std::size_t drawn = 0;
  while (!cover()) {
    std::size_t j = drawn + rng.index(items.size() - drawn);
    std::swap(items[drawn], items[j]);
    cover.add(items[drawn++]);
  }
  return detail::FeeFreeResult(std::span(items.data(), drawn), target);
}

// Phase 1 is a random draw; phase 2 keeps adding random utxos while each
// strictly reduces the distance to 2T and stays within 3T. The first draw
// that fails either test ends the search.
inline SelectionResult select_random_improve(const UtxoPool& pool, Amount target,
                                             std::size_t max_inputs, RngSeed seed) {
  detail::RequireValidTarget(pool, target);
  if (max_inputs == 0) {
    throw SelectionError(ErrorCode::kInvalidArgument, "max_inputs must be at least 1");
  }
  Rng rng(seed);
  auto items = pool.members();
  detail::ValueCover cover{target, Amount(0)};
  std::size_t drawn = 0;
  while (!cover()) {
    std::size_t j = drawn + rng.index(items.size() - drawn);
    std::swap(items[drawn], items[j]);
    cover.add(items[drawn++]);
  }
  if (drawn > max_inputs) {
    throw SelectionError(ErrorCode::kMaxInputsExceeded,
                         "random draw needed " + std::to_string(drawn) + " inputs, limit is " +
                             std::to_string(max_inputs));
  }

  const Amount ideal = target * 2;
  const Amount high = target * 3;
  const std::size_t limit = std::min(max_inputs, items.size());
  Amount selected = cover.sum;
  while (drawn < limit) {
    std::size_t j = drawn + rng.index(items.size() - drawn);
    std::swap(items[drawn], items[j]);
    const Amount candidate = selected + items[drawn]->value;
    if (candidate > high || AbsDiff(ideal, candidate) >= AbsDiff(ideal, selected)) break;
    selected = candidate;
    ++drawn;
  }
  return detail::FeeFreeResult(std::span(items.data(), drawn), target);
}

inline constexpr unsigned kDefaultKnapsackRepeats = 1000;

// Stochastic approximation of the best subset. Each attempt makes a
// random inclusion pass over the value-descending pool and, if the target
// was not reached, a pass over everything left out. Whenever the running
// total overshoots, the selection is recorded if it is the smallest
// overshoot so far and the utxo just added is dropped again so the scan
// can look for a tighter fit among smaller utxos.
inline SelectionResult select_knapsack(const UtxoPool& pool, Amount target,
                                       unsigned repeats, RngSeed seed) {
  detail::RequireValidTarget(pool, target);
  if (repeats == 0) {
    throw SelectionError(ErrorCode::kInvalidArgument, "repeats must be at least 1");
  }
  Rng rng(seed);
  const auto order = PolicyOrder(pool, SortPolicy::Hvf());
  const std::size_t n = order.size();
  std::vector<std::uint64_t> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = order[i]->value.units();
  const std::uint64_t goal = target.units();

  std::vector<char> included(n);
  std::vector<char> best;
  std::uint64_t best_total = std::numeric_limits<std::uint64_t>::max();

  auto finish = [&](const std::vector<char>& mask) {
    std::vector<const Utxo*> chosen;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) chosen.push_back(order[i]);
    }
    return detail::FeeFreeResult(chosen, target);
  };

  for (unsigned rep = 0; rep < repeats; ++rep) {
    std::fill(included.begin(), included.end(), 0);
    std::uint64_t total = 0;  // bounded by the pool total, which fits
    bool reached = false;
    for (int pass = 0; pass < 2 && !reached; ++pass) {
      for (std::size_t i = 0; i < n; ++i) {
        if (pass == 0 ? !rng.coin() : included[i] != 0) continue;
        total += values[i];
        included[i] = 1;
        if (total == goal) return finish(included);
        if (total > goal) {
          reached = true;
          if (total < best_total) {
            best_total = total;
            best = included;
          }
          total -= values[i];
          included[i] = 0;
        }
      }
    }
  }
  return finish(best);
}

enum class BranchPolicy { kRandomized, kInclusionFirst };

struct BnbParams {
  std::int64_t rounds = 1000;
  Amount min_change{0};
  BranchPolicy branch_policy = BranchPolicy::kRandomized;
  FeeParams fee;
};

// Match window used by BnB: [target_for_match, target_for_match + match_range].
struct BnbWindow {
  SignedAmount target_for_match;
  SignedAmount match_range;

  static BnbWindow For(Amount target, const FeeParams& fee) {
    return {ToSigned(target + fee.cost_of(fee.header_bytes) + fee.cost_of(fee.output_bytes)),
            ToSigned(fee.cost_of(fee.input_bytes) + fee.cost_of(fee.output_bytes))};
  }
  SignedAmount upper() const { return target_for_match + match_range; }
};

namespace detail {

class BnbSearch {
 public:
  BnbSearch(std::span<const SignedAmount> eff, BnbWindow window, const BnbParams& params, Rng& rng)
      : eff_(eff), window_(window), policy_(params.branch_policy), rounds_(params.rounds),
        rng_(rng), suffix_(eff.size() + 1, 0) {
    for (std::size_t i = eff.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + eff[i];
  }

  bool Run() { return Recurse(0, 0); }
  const std::vector<std::size_t>& selection() const { return stack_; }

 private:
  bool Recurse(std::size_t depth, SignedAmount current) {
    --rounds_;
    if (current > window_.upper()) return false;
    if (current >= window_.target_for_match) return true;
    if (rounds_ <= 0) return false;
    if (depth >= eff_.size()) return false;
    // Bound: the rest of the candidates cannot lift us into the window.
    if (current + suffix_[depth] < window_.target_for_match) return false;

    const bool include_first = policy_ == BranchPolicy::kInclusionFirst || rng_.coin();
    for (int branch = 0; branch < 2; ++branch) {
      if ((branch == 0) == include_first) {
        stack_.push_back(depth);
        if (Recurse(depth + 1, current + eff_[depth])) return true;
        stack_.pop_back();
      } else {
        if (Recurse(depth + 1, current)) return true;
      }
    }
    return false;
  }

  std::span<const SignedAmount> eff_;
  BnbWindow window_;
  BranchPolicy policy_;
  std::int64_t rounds_;
  Rng& rng_;
  std::vector<SignedAmount> suffix_;
  std::vector<std::size_t> stack_;
};

}  // namespace detail

// Depth-first search for an input set whose effective value
// lands in the match window, so the transaction needs no change output.
// Utxos with non-positive effective value are never candidates. If no
// match is found within the round budget, inputs are drawn at random until
// the change after fees is at least `min_change`.
inline SelectionResult select_bnb(const UtxoPool& pool, Amount target, const BnbParams& params,
                                  RngSeed seed) {
  if (target.is_zero()) {
    throw SelectionError(ErrorCode::kInvalidArgument, "target must be positive");
  }
  if (params.rounds <= 0) {
    throw SelectionError(ErrorCode::kInvalidArgument, "rounds must be positive");
  }
  params.fee.validate();
  const FeeParams& fee = params.fee;
  Rng rng(seed);

  struct Candidate {
    const Utxo* utxo;
    SignedAmount eff;
  };
  std::vector<Candidate> cands;
  SignedAmount eff_total = 0;
  for (const auto& [id, u] : pool) {
    SignedAmount e = effective_value(u, fee);
    if (e > 0) {
      cands.push_back({&u, e});
      eff_total += e;
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.eff > b.eff; });

  const BnbWindow window = BnbWindow::For(target, fee);
  if (eff_total < window.target_for_match) {
    throw SelectionError(ErrorCode::kInsufficientFunds,
                         "effective value " + std::to_string(eff_total) + " below " +
                             std::to_string(window.target_for_match));
  }

  std::vector<SignedAmount> eff(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) eff[i] = cands[i].eff;
  detail::BnbSearch search(eff, window, params, rng);
  if (search.Run()) {
    SelectionResult r;
    for (std::size_t i : search.selection()) {
      r.inputs.push_back(cands[i].utxo->id);
      r.input_value += cands[i].utxo->value;
    }
    r.fee_paid = r.input_value - target;
    r.exact_match = true;
    return r;
  }

  // Fallback: the change output and the header are paid for on top of the
  // target, every input pays for itself through its effective value.
  const SignedAmount overhead =
      ToSigned(fee.cost_of(fee.header_bytes) + fee.cost_of(2ull * fee.output_bytes));
  const SignedAmount goal = ToSigned(target + params.min_change) + overhead;
  if (eff_total < goal) {
    throw SelectionError(ErrorCode::kInsufficientFunds,
                         "effective value " + std::to_string(eff_total) +
                             " cannot fund the fallback goal " + std::to_string(goal));
  }
  SignedAmount sum = 0;
  std::size_t drawn = 0;
  while (sum < goal) {
    std::size_t j = drawn + rng.index(cands.size() - drawn);
    std::swap(cands[drawn], cands[j]);
    sum += cands[drawn++].eff;
  }
  SelectionResult r;
  std::uint64_t input_bytes = 0;
  for (std::size_t i = 0; i < drawn; ++i) {
    r.inputs.push_back(cands[i].utxo->id);
    r.input_value += cands[i].utxo->value;
    input_bytes += cands[i].utxo->size_bytes;
  }
  r.fee_paid = fee.cost_of(fee.header_bytes + input_bytes + 2ull * fee.output_bytes);
  r.change_value = r.input_value - target - r.fee_paid;
  r.exact_match = r.change_value.is_zero();
  return r;
}

}  // namespace coinsel
