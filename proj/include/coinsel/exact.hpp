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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coinsel/amount.hpp"
#include "coinsel/error.hpp"

// Exact oracles: minimum-cardinality covering subsets, exact subset sums,
// and a small 0/1 program solver used as the backend of the optimization
// selectors.
namespace coinsel::exact {

inline constexpr std::size_t kDefaultCap = 24;
inline constexpr std::uint64_t kDpValueCap = 10'000'000;
inline constexpr std::uint64_t kDpCellCap = std::uint64_t{1} << 25;

using IndexSet = std::vector<std::size_t>;

namespace detail {

inline void RequireWithinCap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw SelectionError(ErrorCode::kCapExceeded, "instance of " + std::to_string(n) +
                                                      " variables exceeds cap " +
                                                      std::to_string(cap));
  }
}

// Calls visit(indices) for every k-subset of [0, n) in lexicographic order.
// Stops early when visit returns false.
template <typename Visit>
void ForEachCombination(std::size_t n, std::size_t k, Visit visit) {
  if (k > n) return;
  IndexSet idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!visit(static_cast<const IndexSet&>(idx))) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::uint64_t SumOf(std::span<const Amount> values, const IndexSet& idx) {
  std::uint64_t s = 0;
  for (std::size_t i : idx) s += values[i].units();
  return s;
}

}  // namespace detail

// Minimum-cardinality subset with value >= target. Ties go to the smaller
// value sum, then to the lexicographically smaller index set.
inline IndexSet subset_min_inputs(std::span<const Amount> values, Amount target,
                                  std::size_t cap = kDefaultCap) {
  detail::RequireWithinCap(values.size(), cap);
  Amount total;
  for (Amount v : values) total += v;
  if (total < target) {
    throw SelectionError(ErrorCode::kInfeasible, "values cannot cover the target");
  }
  if (target.is_zero()) return {};

  // The k largest values decide the smallest feasible cardinality.
  std::vector<std::uint64_t> sorted;
  for (Amount v : values) sorted.push_back(v.units());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::size_t k = 0;
  for (std::uint64_t acc = 0; acc < target.units(); ++k) acc += sorted[k];

  IndexSet best;
  std::uint64_t best_sum = std::numeric_limits<std::uint64_t>::max();
  detail::ForEachCombination(values.size(), k, [&](const IndexSet& idx) {
    const std::uint64_t s = detail::SumOf(values, idx);
    if (s >= target.units() && s < best_sum) {
      best_sum = s;
      best = idx;
      if (s == target.units()) return false;
    }
    return true;
  });
  return best;
}

// Some subset summing exactly to target: the lexicographically smallest
// among the minimum-cardinality matches. Dynamic programming over amounts
// when the table is small enough, enumeration otherwise.
inline std::optional<IndexSet> subset_exact_match(std::span<const Amount> values, Amount target,
                                                  std::size_t cap = kDefaultCap) {
  if (target.is_zero()) return IndexSet{};
  const std::size_t n = values.size();
  std::uint64_t total = 0;
  for (Amount v : values) total += v.units();
  if (total < target.units()) return std::nullopt;

  const std::uint64_t width = target.units() + 1;
  if (total <= kDpValueCap && width * (n + 1) <= kDpCellCap) {
    constexpr std::uint16_t kNone = std::numeric_limits<std::uint16_t>::max();
    // best[i][s]: fewest items among i..n-1 summing to s.
    std::vector<std::uint16_t> best(width * (n + 1), kNone);
    auto at = [&](std::size_t i, std::uint64_t s) -> std::uint16_t& { return best[i * width + s]; };
    at(n, 0) = 0;
    for (std::size_t i = n; i-- > 0;) {
      const std::uint64_t v = values[i].units();
      for (std::uint64_t s = 0; s < width; ++s) {
        std::uint16_t cand = at(i + 1, s);
        if (v <= s && at(i + 1, s - v) != kNone) {
          cand = std::min<std::uint16_t>(cand, at(i + 1, s - v) + 1);
        }
        at(i, s) = cand;
      }
    }
    if (at(0, target.units()) == kNone) return std::nullopt;
    IndexSet out;
    std::uint64_t s = target.units();
    for (std::size_t i = 0; i < n && s > 0; ++i) {
      const std::uint64_t v = values[i].units();
      if (v <= s && at(i + 1, s - v) != kNone && at(i + 1, s - v) + 1 == at(i, s)) {
        out.push_back(i);
        s -= v;
      }
    }
    return out;
  }

  detail::RequireWithinCap(n, cap);
  for (std::size_t k = 1; k <= n; ++k) {
    std::optional<IndexSet> found;
    detail::ForEachCombination(n, k, [&](const IndexSet& idx) {
      if (detail::SumOf(values, idx) == target.units()) {
        found = idx;
        return false;
      }
      return true;
    });
    if (found) return found;
  }
  return std::nullopt;
}

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct Indicator {
  std::size_t var;
  bool value;
};

// sum_i coeffs[i] * x_i  (relation)  rhs, optionally enforced only when
// x[only_if->var] == only_if->value.
struct LinearConstraint {
  std::vector<std::int64_t> coeffs;
  Relation relation = Relation::kLessEqual;
  std::int64_t rhs = 0;
  std::optional<Indicator> only_if;
};

struct BinaryProgram {
  std::size_t n = 0;
  std::vector<std::int64_t> objective;  // per-variable weights
  Sense sense = Sense::kMinimize;
  std::vector<LinearConstraint> constraints;
};

struct BinarySolution {
  std::vector<bool> assignment;
  std::int64_t objective = 0;
};

struct SolveOptions {
  bool prune = true;
  std::size_t cap = kDefaultCap;
};

namespace detail {

inline bool Satisfied(std::int64_t activity, Relation rel, std::int64_t rhs) {
  switch (rel) {
    case Relation::kLessEqual: return activity <= rhs;
    case Relation::kGreaterEqual: return activity >= rhs;
    case Relation::kEqual: return activity == rhs;
  }
  return false;
}

class BinarySolver {
 public:
  BinarySolver(const BinaryProgram& p, bool prune) : p_(p), prune_(prune), x_(p.n, false) {
    const std::size_t n = p.n;
    activity_.assign(p.constraints.size(), 0);
    lo_.assign(p.constraints.size(), std::vector<std::int64_t>(n + 1, 0));
    hi_ = lo_;
    for (std::size_t c = 0; c < p.constraints.size(); ++c) {
      for (std::size_t i = n; i-- > 0;) {
        const std::int64_t a = p.constraints[c].coeffs[i];
        lo_[c][i] = lo_[c][i + 1] + std::min<std::int64_t>(0, a);
        hi_[c][i] = hi_[c][i + 1] + std::max<std::int64_t>(0, a);
      }
    }
    obj_slack_.assign(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
      const std::int64_t w = p.objective[i];
      obj_slack_[i] = obj_slack_[i + 1] +
                      (p.sense == Sense::kMinimize ? std::min<std::int64_t>(0, w)
                                                   : std::max<std::int64_t>(0, w));
    }
  }

  std::optional<BinarySolution> Solve() {
    Recurse(0, 0);
    return best_;
  }

 private:
  bool Active(const LinearConstraint& c, std::size_t fixed) const {
    if (!c.only_if) return true;
    return c.only_if->var < fixed && x_[c.only_if->var] == c.only_if->value;
  }

  bool Better(std::int64_t obj) const {
    if (!best_) return true;
    return p_.sense == Sense::kMinimize ? obj < best_->objective : obj > best_->objective;
  }

  bool Prunable(std::size_t depth, std::int64_t obj) const {
    if (best_ && !Better(obj + obj_slack_[depth])) return true;
    for (std::size_t c = 0; c < p_.constraints.size(); ++c) {
      const auto& con = p_.constraints[c];
      if (!Active(con, depth)) continue;
      const std::int64_t lo = activity_[c] + lo_[c][depth];
      const std::int64_t hi = activity_[c] + hi_[c][depth];
      switch (con.relation) {
        case Relation::kLessEqual:
          if (lo > con.rhs) return true;
          break;
        case Relation::kGreaterEqual:
          if (hi < con.rhs) return true;
          break;
        case Relation::kEqual:
          if (lo > con.rhs || hi < con.rhs) return true;
          break;
      }
    }
    return false;
  }

  void Recurse(std::size_t depth, std::int64_t obj) {
    if (prune_ && Prunable(depth, obj)) return;
    if (depth == p_.n) {
      for (std::size_t c = 0; c < p_.constraints.size(); ++c) {
        const auto& con = p_.constraints[c];
        if (Active(con, depth) && !Satisfied(activity_[c], con.relation, con.rhs)) return;
      }
      if (Better(obj)) best_ = BinarySolution{x_, obj};
      return;
    }
    Recurse(depth + 1, obj);
    x_[depth] = true;
    for (std::size_t c = 0; c < p_.constraints.size(); ++c) {
      activity_[c] += p_.constraints[c].coeffs[depth];
    }
    Recurse(depth + 1, obj + p_.objective[depth]);
    for (std::size_t c = 0; c < p_.constraints.size(); ++c) {
      activity_[c] -= p_.constraints[c].coeffs[depth];
    }
    x_[depth] = false;
  }

  const BinaryProgram& p_;
  bool prune_;
  std::vector<bool> x_;
  std::vector<std::int64_t> activity_;
  std::vector<std::vector<std::int64_t>> lo_, hi_;
  std::vector<std::int64_t> obj_slack_;
  std::optional<BinarySolution> best_;
};

}  // namespace detail

// Global optimum by depth-first enumeration (0 before 1 at every variable).
// Only strictly better assignments replace the incumbent, so among optima
// the lexicographically smallest assignment wins. Pruning drops subtrees
// whose objective bound cannot beat the incumbent or whose constraints can
// no longer be met; it never changes the answer.
inline BinarySolution solve_binary(const BinaryProgram& program, SolveOptions options = {}) {
  detail::RequireWithinCap(program.n, options.cap);
  if (program.objective.size() != program.n) {
    throw SelectionError(ErrorCode::kInvalidArgument, "objective length differs from n");
  }
  for (const auto& c : program.constraints) {
    if (c.coeffs.size() != program.n) {
      throw SelectionError(ErrorCode::kInvalidArgument, "constraint length differs from n");
    }
    if (c.only_if && c.only_if->var >= program.n) {
      throw SelectionError(ErrorCode::kInvalidArgument, "indicator variable out of range");
    }
  }
  auto best = detail::BinarySolver(program, options.prune).Solve();
  if (!best) throw SelectionError(ErrorCode::kInfeasible, "no assignment satisfies the constraints");
  return *best;
}

}  // namespace coinsel::exact
