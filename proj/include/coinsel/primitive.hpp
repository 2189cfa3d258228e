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
#include <compare>
#include <string>
#include <vector>

#include "coinsel/domain.hpp"

namespace coinsel {

namespace detail {

inline void RequireValidTarget(const UtxoPool& pool, Amount target) {
  if (target.is_zero()) {
    throw SelectionError(ErrorCode::kInvalidArgument, "target must be positive");
  }
  if (pool.total_value() < target) {
    throw SelectionError(ErrorCode::kInsufficientFunds,
                         "pool holds " + std::to_string(pool.total_value().units()) +
                             ", target is " + std::to_string(target.units()));
  }
}

// Fee-free result: change is whatever the inputs exceed the target by.
template <typename Range>
SelectionResult FeeFreeResult(const Range& chosen, Amount target) {
  SelectionResult r;
  for (const Utxo* u : chosen) {
    r.inputs.push_back(u->id);
    r.input_value += u->value;
  }
  r.change_value = r.input_value - target;
  r.exact_match = r.change_value.is_zero();
  return r;
}

}  // namespace detail

enum class SortKey { kAge, kValue, kPriority };
enum class SortDirection { kAscending, kDescending };

struct SortPolicy {
  SortKey key = SortKey::kValue;
  SortDirection direction = SortDirection::kDescending;

  static constexpr SortPolicy Fifo() { return {SortKey::kAge, SortDirection::kDescending}; }
  static constexpr SortPolicy Lifo() { return {SortKey::kAge, SortDirection::kAscending}; }
  static constexpr SortPolicy Hvf() { return {SortKey::kValue, SortDirection::kDescending}; }
  static constexpr SortPolicy Lvf() { return {SortKey::kValue, SortDirection::kAscending}; }
  static constexpr SortPolicy Hpf() { return {SortKey::kPriority, SortDirection::kDescending}; }

  friend constexpr bool operator==(SortPolicy, SortPolicy) = default;
};

inline std::uint64_t SortKeyOf(const Utxo& u, SortKey key) {
  switch (key) {
    case SortKey::kAge: return u.age;
    case SortKey::kValue: return u.value.units();
    case SortKey::kPriority: return priority(u);
  }
  return 0;
}

// Orders utxos whose keys are equal under the policy: ascending id,
// whatever the policy direction.
inline std::strong_ordering tie_break(const Utxo& a, const Utxo& b, SortPolicy /*policy*/) {
  return a.id <=> b.id;
}

// Strict weak (in fact total, ids being unique) order: true if `a` is
// picked before `b`.
inline bool PolicyBefore(const Utxo& a, const Utxo& b, SortPolicy policy) {
  const std::uint64_t ka = SortKeyOf(a, policy.key);
  const std::uint64_t kb = SortKeyOf(b, policy.key);
  if (ka != kb) {
    return policy.direction == SortDirection::kAscending ? ka < kb : ka > kb;
  }
  return tie_break(a, b, policy) < 0;
}

inline std::vector<const Utxo*> PolicyOrder(const UtxoPool& pool, SortPolicy policy) {
  auto order = pool.members();
  std::stable_sort(order.begin(), order.end(), [policy](const Utxo* a, const Utxo* b) {
    return PolicyBefore(*a, *b, policy);
  });
  return order;
}

// Shortest prefix of the policy order covering `target`. A heap yields
// that prefix without sorting the whole pool, which matters for the
// large pools HVF accumulates in simulation.
inline SelectionResult select_primitive(const UtxoPool& pool, Amount target, SortPolicy policy) {
  detail::RequireValidTarget(pool, target);
  auto heap = pool.members();
  auto after = [policy](const Utxo* a, const Utxo* b) { return PolicyBefore(*b, *a, policy); };
  std::make_heap(heap.begin(), heap.end(), after);

  std::vector<const Utxo*> chosen;
  Amount covered;
  while (covered < target) {
    std::pop_heap(heap.begin(), heap.end(), after);
    chosen.push_back(heap.back());
    covered += heap.back()->value;
    heap.pop_back();
  }
  return detail::FeeFreeResult(chosen, target);
}

}  // namespace coinsel
