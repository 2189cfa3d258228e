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
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coinsel/amount.hpp"
#include "coinsel/error.hpp"

namespace coinsel {

struct Utxo {
  std::string id;
  Amount value;
  std::uint32_t size_bytes = 148;
  std::uint64_t age = 0;  // confirmation count
  std::string address;
};

// A wallet's spendable outputs, keyed and iterated by ascending id. The
// running total is maintained on every insert and erase.
class UtxoPool {
 public:
  using container = std::map<std::string, Utxo, std::less<>>;
  using const_iterator = container::const_iterator;

  UtxoPool() = default;
  UtxoPool(std::initializer_list<Utxo> utxos) {
    for (const auto& u : utxos) add(u);
  }
  explicit UtxoPool(const std::vector<Utxo>& utxos) {
    for (const auto& u : utxos) add(u);
  }

  void add(Utxo u) {
    if (u.size_bytes == 0) {
      throw SelectionError(ErrorCode::kInvalidArgument, "utxo '" + u.id + "' has zero size");
    }
    Amount new_total = total_ + u.value;
    std::string key = u.id;
    auto [it, inserted] = utxos_.try_emplace(std::move(key), std::move(u));
    if (!inserted) {
      throw SelectionError(ErrorCode::kInvalidArgument, "duplicate utxo id '" + it->first + "'");
    }
    total_ = new_total;
  }

  Utxo remove(std::string_view id) {
    auto it = utxos_.find(id);
    if (it == utxos_.end()) {
      throw SelectionError(ErrorCode::kInvalidArgument,
                           "utxo '" + std::string(id) + "' not in pool");
    }
    Utxo out = std::move(it->second);
    utxos_.erase(it);
    total_ -= out.value;
    return out;
  }

  const Utxo* find(std::string_view id) const {
    auto it = utxos_.find(id);
    return it == utxos_.end() ? nullptr : &it->second;
  }
  bool contains(std::string_view id) const { return utxos_.find(id) != utxos_.end(); }

  std::size_t size() const noexcept { return utxos_.size(); }
  bool empty() const noexcept { return utxos_.empty(); }
  Amount total_value() const noexcept { return total_; }

  const_iterator begin() const noexcept { return utxos_.begin(); }
  const_iterator end() const noexcept { return utxos_.end(); }

  // Members in id order; pointers stay valid until the pool is modified.
  std::vector<const Utxo*> members() const {
    std::vector<const Utxo*> out;
    out.reserve(utxos_.size());
    for (const auto& [id, u] : utxos_) out.push_back(&u);
    return out;
  }

  void age_all(std::uint64_t by = 1) {
    for (auto& [id, u] : utxos_) u.age += by;
  }

 private:
  container utxos_;
  Amount total_;
};

struct FeeParams {
  Amount fee_per_byte{0};
  std::uint32_t header_bytes = 10;
  std::uint32_t input_bytes = 148;
  std::uint32_t output_bytes = 34;
  Amount dust_threshold{1};
  Amount min_change{1};
  std::uint32_t change_output_bytes = 34;
  std::uint32_t max_tx_bytes = 100000;
  Amount max_overpay{0};

  void validate() const {
    if (header_bytes == 0 || input_bytes == 0 || output_bytes == 0 ||
        change_output_bytes == 0 || max_tx_bytes == 0) {
      throw SelectionError(ErrorCode::kInvalidArgument, "fee byte constants must be positive");
    }
  }

  Amount cost_of(std::uint64_t bytes) const { return fee_per_byte * bytes; }
};

struct SelectionResult {
  std::vector<std::string> inputs;  // in the order the selector added them
  Amount input_value;
  Amount change_value;
  Amount fee_paid;
  bool exact_match = false;

  friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

// Payment requests kept in descending order.
class PayRequestSet {
 public:
  PayRequestSet() = default;
  PayRequestSet(std::initializer_list<Amount> targets)
      : PayRequestSet(std::vector<Amount>(targets)) {}
  explicit PayRequestSet(std::vector<Amount> targets) : targets_(std::move(targets)) {
    if (targets_.empty()) {
      throw SelectionError(ErrorCode::kInvalidArgument, "pay request set is empty");
    }
    for (Amount t : targets_) {
      if (t.is_zero()) {
        throw SelectionError(ErrorCode::kInvalidArgument, "pay request must be positive");
      }
    }
    std::sort(targets_.begin(), targets_.end(), std::greater<>());
  }

  const std::vector<Amount>& targets() const noexcept { return targets_; }
  std::size_t size() const noexcept { return targets_.size(); }
  Amount total() const {
    Amount sum;
    for (Amount t : targets_) sum += t;
    return sum;
  }

 private:
  std::vector<Amount> targets_;
};

inline Amount total_value(const UtxoPool& pool) {
  Amount sum;
  for (const auto& [id, u] : pool) sum += u.value;
  return sum;
}

inline SignedAmount effective_value(const Utxo& u, const FeeParams& fee) {
  return ToSigned(u.value) - ToSigned(fee.fee_per_byte * u.size_bytes);
}

inline std::uint64_t priority(const Utxo& u) {
  if (u.age != 0 && u.value.units() > std::numeric_limits<std::uint64_t>::max() / u.age) {
    throw SelectionError(ErrorCode::kOverflow, "priority of '" + u.id + "' overflows");
  }
  return u.value.units() * u.age;
}

inline constexpr std::size_t kDefaultEnumerationCap = 20;

// All nonzero subset sums, ascending.
inline std::vector<Amount> reachable_sums(const UtxoPool& pool,
                                          std::size_t cap = kDefaultEnumerationCap) {
  if (pool.size() > cap) {
    throw SelectionError(ErrorCode::kCapExceeded,
                         "pool of " + std::to_string(pool.size()) +
                             " exceeds enumeration cap " + std::to_string(cap));
  }
  std::set<Amount> sums;
  for (const auto& [id, u] : pool) {
    std::vector<Amount> next;
    next.reserve(sums.size() + 1);
    for (Amount s : sums) next.push_back(s + u.value);
    next.push_back(u.value);
    sums.insert(next.begin(), next.end());
  }
  sums.erase(Amount(0));
  return {sums.begin(), sums.end()};
}

// Returns a description of the first violated invariant, or nullopt.
// `carried_input` is value spent from outside the pool (a prior change).
inline std::optional<std::string> CheckResult(const UtxoPool& pool, Amount target,
                                              const SelectionResult& r,
                                              Amount carried_input = Amount(0)) {
  std::set<std::string_view> seen;
  Amount sum = carried_input;
  for (const auto& id : r.inputs) {
    const Utxo* u = pool.find(id);
    if (u == nullptr) return "input '" + id + "' is not in the pool";
    if (!seen.insert(id).second) return "input '" + id + "' repeated";
    sum += u->value;
  }
  if (sum != r.input_value) return "input_value does not equal the sum of inputs";
  if (r.input_value != target + r.fee_paid + r.change_value) {
    return "input_value != target + fee_paid + change_value";
  }
  if (r.exact_match != r.change_value.is_zero()) return "exact_match disagrees with change";
  return std::nullopt;
}

}  // namespace coinsel
