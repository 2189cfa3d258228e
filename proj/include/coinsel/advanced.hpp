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
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coinsel/basic.hpp"
#include "coinsel/domain.hpp"
#include "coinsel/exact.hpp"
#include "coinsel/primitive.hpp"
#include "coinsel/rng.hpp"

namespace coinsel {

inline constexpr std::size_t kExactPoolCap = 20;

inline std::uint64_t tx_size(std::uint64_t n_inputs, std::uint64_t n_outputs, bool has_change,
                             const FeeParams& fee) {
  return fee.header_bytes + fee.input_bytes * n_inputs + fee.output_bytes * n_outputs +
         (has_change ? fee.output_bytes : 0);
}

namespace detail {

inline void RequireExactCap(const UtxoPool& pool, std::size_t cap) {
  if (pool.size() > cap) {
    throw SelectionError(ErrorCode::kCapExceeded, "pool of " + std::to_string(pool.size()) +
                                                      " exceeds the exact-solver cap " +
                                                      std::to_string(cap));
  }
}

inline std::int64_t I64(Amount a) { return ToSigned(a); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Two-phase optimization: minimal transaction size, then as many inputs as
// possible within (1 + gamma) of that size.

struct IlpParams {
  FeeParams fee;
  double gamma = 0.5;
  std::size_t pool_cap = kExactPoolCap;
};

struct IlpSelection {
  SelectionResult selection;
  std::uint64_t optimal_size = 0;  // phase-1 y
  std::uint64_t size = 0;          // y of the returned transaction
  bool has_change = false;
};

namespace detail {

// Variable 0 is the change flag, variable i+1 selects members[i].
struct IlpModel {
  exact::BinaryProgram program;
  std::int64_t base_bytes = 0;  // header plus payment outputs
};

inline IlpModel BuildIlpModel(const std::vector<const Utxo*>& members,
                              const PayRequestSet& requests, const FeeParams& fee) {
  const std::size_t n = members.size();
  const std::int64_t alpha = I64(fee.fee_per_byte);
  const std::int64_t beta = fee.change_output_bytes;
  IlpModel m;
  m.base_bytes = static_cast<std::int64_t>(fee.header_bytes) +
                 static_cast<std::int64_t>(fee.output_bytes) *
                     static_cast<std::int64_t>(requests.size());
  const std::int64_t paid = I64(requests.total());

  auto& p = m.program;
  p.n = n + 1;
  p.objective.assign(n + 1, 0);
  p.objective[0] = beta;
  for (std::size_t i = 0; i < n; ++i) p.objective[i + 1] = members[i]->size_bytes;

  // y <= M
  exact::LinearConstraint size_cap{p.objective, exact::Relation::kLessEqual,
                                   static_cast<std::int64_t>(fee.max_tx_bytes) - m.base_bytes,
                                   std::nullopt};
  // Change value c = sum v x - paid - alpha y.
  std::vector<std::int64_t> change(n + 1);
  change[0] = -alpha * beta;
  for (std::size_t i = 0; i < n; ++i) {
    change[i + 1] = I64(members[i]->value) - alpha * members[i]->size_bytes;
  }
  const std::int64_t change_offset = paid + alpha * m.base_bytes;
  exact::LinearConstraint no_change{change, exact::Relation::kEqual, change_offset,
                                    exact::Indicator{0, false}};
  exact::LinearConstraint with_change{change, exact::Relation::kGreaterEqual,
                                      change_offset + I64(fee.min_change),
                                      exact::Indicator{0, true}};
  p.constraints = {size_cap, no_change, with_change};
  return m;
}

}  // namespace detail

inline IlpSelection select_ilp_two_phase(const UtxoPool& pool, const PayRequestSet& requests,
                                         const IlpParams& params) {
  detail::RequireExactCap(pool, params.pool_cap);
  params.fee.validate();
  if (!(params.gamma > 0.0 && params.gamma < 1.0)) {
    throw SelectionError(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1)");
  }
  if (requests.total() < params.fee.dust_threshold) {
    throw SelectionError(ErrorCode::kInfeasible, "payments fall below the dust threshold");
  }
  const auto members = pool.members();
  auto model = detail::BuildIlpModel(members, requests, params.fee);
  const exact::SolveOptions opts{true, params.pool_cap + 1};

  auto phase1 = exact::solve_binary(model.program, opts);
  const std::int64_t y_opt = model.base_bytes + phase1.objective;

  const auto y_limit =
      static_cast<std::int64_t>(std::floor(static_cast<double>(y_opt) * (1.0 + params.gamma) + 1e-9));
  auto& p = model.program;
  p.constraints.push_back({p.objective, exact::Relation::kLessEqual, y_limit - model.base_bytes,
                           std::nullopt});
  std::vector<std::int64_t> count(p.n, 1);
  count[0] = -1;
  const std::vector<std::int64_t> size_weights = p.objective;
  p.objective = count;
  p.sense = exact::Sense::kMaximize;
  auto phase2 = exact::solve_binary(p, opts);

  IlpSelection out;
  out.optimal_size = static_cast<std::uint64_t>(y_opt);
  out.has_change = phase2.assignment[0];
  std::int64_t y = model.base_bytes;
  for (std::size_t v = 0; v < p.n; ++v) {
    if (phase2.assignment[v]) y += size_weights[v];
  }
  out.size = static_cast<std::uint64_t>(y);
  auto& r = out.selection;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (phase2.assignment[i + 1]) {
      r.inputs.push_back(members[i]->id);
      r.input_value += members[i]->value;
    }
  }
  r.fee_paid = params.fee.cost_of(out.size);
  r.change_value = r.input_value - requests.total() - r.fee_paid;
  r.exact_match = r.change_value.is_zero();
  return out;
}

// ---------------------------------------------------------------------------
// Knapsack with leverage: a change-free transaction if one exists, else a
// pair whose second transaction absorbs the first one's change exactly.

struct LeverageProblem {
  UtxoPool pool;
  PayRequestSet requests;
  FeeParams fee;                       // fee_per_byte, dust_threshold, max_overpay
  std::size_t current_requests = 1;    // leading requests paid by the first transaction
  std::size_t max_leverage_requests = 2;
  std::size_t pool_cap = kExactPoolCap;
};

struct TxPlan {
  SelectionResult selection;  // target is the sum of `outputs`; fee_paid includes the tip
  std::vector<Amount> outputs;
  Amount tip;
  Amount carried_change;  // prior change spent as an extra input
  std::uint64_t size_bytes = 0;
};

enum class LeverageKind { kChangeFree, kLeveraged, kFallback };

struct LeverageResult {
  LeverageKind kind = LeverageKind::kChangeFree;
  TxPlan first;
  std::optional<TxPlan> second;
};

namespace detail {

inline TxPlan MakePlan(const std::vector<const Utxo*>& chosen, std::vector<Amount> outputs,
                       const FeeParams& fee, bool with_change, Amount carried = Amount(0)) {
  TxPlan plan;
  plan.outputs = std::move(outputs);
  plan.carried_change = carried;
  Amount paid;
  for (Amount o : plan.outputs) paid += o;
  auto& r = plan.selection;
  r.input_value = carried;
  for (const Utxo* u : chosen) {
    r.inputs.push_back(u->id);
    r.input_value += u->value;
  }
  const std::uint64_t inputs = chosen.size() + (carried.is_zero() ? 0 : 1);
  plan.size_bytes = tx_size(inputs, plan.outputs.size(), with_change, fee);
  const Amount weight_fee = fee.cost_of(plan.size_bytes);
  if (with_change) {
    r.fee_paid = weight_fee;
    r.change_value = r.input_value - paid - weight_fee;
  } else {
    plan.tip = r.input_value - paid - weight_fee;
    r.fee_paid = weight_fee + plan.tip;
  }
  r.exact_match = r.change_value.is_zero();
  return plan;
}

inline std::vector<const Utxo*> Pick(const std::vector<const Utxo*>& members,
                                     const std::vector<bool>& x, std::size_t offset = 0) {
  std::vector<const Utxo*> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (x[i + offset]) out.push_back(members[i]);
  }
  return out;
}

}  // namespace detail

inline LeverageResult select_knapsack_leverage(const LeverageProblem& problem) {
  detail::RequireExactCap(problem.pool, problem.pool_cap);
  problem.fee.validate();
  const auto& fee = problem.fee;
  const auto& all = problem.requests.targets();
  if (problem.current_requests == 0 || problem.current_requests > all.size()) {
    throw SelectionError(ErrorCode::kInvalidArgument, "current_requests out of range");
  }
  const std::vector<Amount> o1(all.begin(), all.begin() + problem.current_requests);
  const std::vector<Amount> pending(all.begin() + problem.current_requests, all.end());
  Amount o1_total;
  for (Amount o : o1) o1_total += o;

  const auto members = problem.pool.members();
  const std::size_t n = members.size();
  const std::int64_t alpha = detail::I64(fee.fee_per_byte);
  const std::int64_t in_bytes = fee.input_bytes;
  const std::int64_t fixed1 =
      detail::I64(o1_total) +
      alpha * static_cast<std::int64_t>(fee.header_bytes + fee.output_bytes * o1.size());
  const exact::SolveOptions opts{true, problem.pool_cap};

  // Change-free: 0 <= r <= H, minimizing alpha * W + r = sum v - sum o.
  {
    exact::BinaryProgram p;
    p.n = n;
    std::vector<std::int64_t> net(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.objective.push_back(detail::I64(members[i]->value));
      net[i] = detail::I64(members[i]->value) - alpha * in_bytes;
    }
    p.constraints.push_back({net, exact::Relation::kGreaterEqual, fixed1, std::nullopt});
    p.constraints.push_back(
        {net, exact::Relation::kLessEqual, fixed1 + detail::I64(fee.max_overpay), std::nullopt});
    try {
      auto sol = exact::solve_binary(p, opts);
      return {LeverageKind::kChangeFree,
              detail::MakePlan(detail::Pick(members, sol.assignment), o1, fee, false),
              std::nullopt};
    } catch (const SelectionError& e) {
      if (e.code() != ErrorCode::kInfeasible) throw;
    }
  }

  // Leverage pair. Each utxo goes to the first transaction, the second, or
  // neither. The first must leave change >= D with no tip; the second
  // spends that change and must be change-free with 0 <= r2 <= H. The
  // combined cost of both transactions is the total input value less the
  // payments, so the search minimizes total input value.
  struct Best {
    std::int64_t spent = std::numeric_limits<std::int64_t>::max();
    std::size_t inputs = std::numeric_limits<std::size_t>::max();
    std::vector<int> state;
    std::vector<Amount> o2;
  } best;
  const std::int64_t dust = detail::I64(fee.dust_threshold);
  const std::int64_t overpay = detail::I64(fee.max_overpay);
  std::vector<int> state(n, 0);
  const std::size_t max_o2 = std::min(problem.max_leverage_requests, pending.size());
  for (std::size_t k = 1; k <= max_o2; ++k) {
    exact::detail::ForEachCombination(pending.size(), k, [&](const exact::IndexSet& pick) {
      std::vector<Amount> o2;
      std::int64_t o2_total = 0;
      for (std::size_t j : pick) {
        o2.push_back(pending[j]);
        o2_total += detail::I64(pending[j]);
      }
      std::function<void(std::size_t, std::int64_t, std::int64_t, std::size_t, std::size_t)> dfs =
          [&](std::size_t i, std::int64_t v1, std::int64_t v2, std::size_t k1, std::size_t k2) {
            if (v1 + v2 > best.spent) return;
            if (i == n) {
              if (k1 == 0) return;
              const std::int64_t w1 =
                  static_cast<std::int64_t>(tx_size(k1, o1.size(), true, fee));
              const std::int64_t c1 = v1 - detail::I64(o1_total) - alpha * w1;
              if (c1 < dust) return;
              const std::int64_t w2 =
                  static_cast<std::int64_t>(tx_size(k2 + 1, o2.size(), false, fee));
              const std::int64_t r2 = v2 + c1 - o2_total - alpha * w2;
              if (r2 < 0 || r2 > overpay) return;
              const std::size_t inputs = k1 + k2;
              if (v1 + v2 < best.spent || (v1 + v2 == best.spent && inputs < best.inputs)) {
                best.spent = v1 + v2;
                best.inputs = inputs;
                best.state = state;
                best.o2 = o2;
              }
              return;
            }
            const std::int64_t v = detail::I64(members[i]->value);
            dfs(i + 1, v1, v2, k1, k2);
            state[i] = 1;
            dfs(i + 1, v1 + v, v2, k1 + 1, k2);
            state[i] = 2;
            dfs(i + 1, v1, v2 + v, k1, k2 + 1);
            state[i] = 0;
          };
      dfs(0, 0, 0, 0, 0);
      return true;
    });
  }
  if (!best.state.empty()) {
    std::vector<const Utxo*> s1, s2;
    for (std::size_t i = 0; i < n; ++i) {
      if (best.state[i] == 1) s1.push_back(members[i]);
      if (best.state[i] == 2) s2.push_back(members[i]);
    }
    LeverageResult out{LeverageKind::kLeveraged, detail::MakePlan(s1, o1, fee, true), std::nullopt};
    out.second = detail::MakePlan(s2, best.o2, fee, false, out.first.selection.change_value);
    return out;
  }

  // Fallback: one transaction with change >= D, fewest inputs, then the
  // smallest input value.
  {
    Amount total = problem.pool.total_value();
    const std::int64_t heavy = detail::I64(total) + 1;
    if (heavy > std::numeric_limits<std::int64_t>::max() / static_cast<std::int64_t>(n + 1)) {
      throw SelectionError(ErrorCode::kOverflow, "pool value too large for the fallback search");
    }
    exact::BinaryProgram p;
    p.n = n;
    std::vector<std::int64_t> net(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.objective.push_back(heavy + detail::I64(members[i]->value));
      net[i] = detail::I64(members[i]->value) - alpha * in_bytes;
    }
    p.constraints.push_back({net, exact::Relation::kGreaterEqual,
                             fixed1 + alpha * static_cast<std::int64_t>(fee.output_bytes) + dust,
                             std::nullopt});
    auto sol = exact::solve_binary(p, opts);
    return {LeverageKind::kFallback,
            detail::MakePlan(detail::Pick(members, sol.assignment), o1, fee, true), std::nullopt};
  }
}

// ---------------------------------------------------------------------------
// Two-period selection: myopic (second target unknown when the first is
// paid) and strategic (both known, trading input count against linkage).

struct TwoPeriodResult {
  SelectionResult first;
  SelectionResult second;  // input_value includes the carried change when spent
  bool second_spends_change = false;
  std::size_t union_size = 0;  // |S1 u S2|, counting the spent change
  bool linked = false;         // shared address or spent change
  double objective = 0.0;
};

namespace detail {

inline std::vector<Amount> ValuesOf(const std::vector<const Utxo*>& members) {
  std::vector<Amount> v;
  v.reserve(members.size());
  for (const Utxo* u : members) v.push_back(u->value);
  return v;
}

inline void RequirePositiveTargets(Amount t1, Amount t2) {
  if (t1.is_zero() || t2.is_zero()) {
    throw SelectionError(ErrorCode::kInvalidArgument, "both period targets must be positive");
  }
}

}  // namespace detail

inline TwoPeriodResult select_myopic(const UtxoPool& pool, Amount t1, Amount t2,
                                     std::size_t cap = kExactPoolCap) {
  detail::RequireExactCap(pool, cap);
  detail::RequirePositiveTargets(t1, t2);
  const auto members = pool.members();
  const auto values = detail::ValuesOf(members);
  const auto first_idx = exact::subset_min_inputs(values, t1, cap);

  TwoPeriodResult out;
  std::vector<char> used(members.size(), 0);
  std::vector<const Utxo*> s1;
  for (std::size_t i : first_idx) {
    used[i] = 1;
    s1.push_back(members[i]);
  }
  out.first = detail::FeeFreeResult(s1, t1);

  std::vector<const Utxo*> rest;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!used[i]) rest.push_back(members[i]);
  }
  auto values2 = detail::ValuesOf(rest);
  const Amount change1 = out.first.change_value;
  if (!change1.is_zero()) values2.push_back(change1);
  const auto second_idx = exact::subset_min_inputs(values2, t2, cap + 1);

  auto& r2 = out.second;
  for (std::size_t i : second_idx) {
    if (i == rest.size()) {
      out.second_spends_change = true;
      r2.input_value += change1;
    } else {
      r2.inputs.push_back(rest[i]->id);
      r2.input_value += rest[i]->value;
    }
  }
  r2.change_value = r2.input_value - t2;
  r2.exact_match = r2.change_value.is_zero();
  out.union_size = out.first.inputs.size() + second_idx.size();
  std::set<std::string_view> a1;
  for (const Utxo* u : s1) {
    if (!u->address.empty()) a1.insert(u->address);
  }
  out.linked = out.second_spends_change;
  for (const auto& id : r2.inputs) {
    const Utxo* u = pool.find(id);
    if (!u->address.empty() && a1.contains(u->address)) out.linked = true;
  }
  out.objective = static_cast<double>(out.union_size);
  return out;
}

struct StrategicParams {
  double lambda = 0.5;
  Amount t1;
  Amount t2;
};

// Minimizes (1 - lambda) |S1 u S2| + lambda [A1 n A2 != {} or c1 in S2]
// exactly. For a fixed S1 the best S2 is one of three largest-first
// prefixes: address-disjoint from S1, unrestricted, or spending c1, so the
// search is over the 2^n choices of S1. Utxos without an address never
// link.
inline TwoPeriodResult select_strategic(const UtxoPool& pool, const StrategicParams& params,
                                        std::size_t cap = kExactPoolCap) {
  detail::RequireExactCap(pool, cap);
  detail::RequirePositiveTargets(params.t1, params.t2);
  if (!(params.lambda >= 0.0 && params.lambda <= 1.0)) {
    throw SelectionError(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  }
  const double lambda = params.lambda;
  const auto by_value = PolicyOrder(pool, SortPolicy::Hvf());
  const std::size_t n = by_value.size();
  if (n >= 63) throw SelectionError(ErrorCode::kCapExceeded, "strategic search needs fewer than 63 utxos");
  const std::uint64_t t1 = params.t1.units();
  const std::uint64_t t2 = params.t2.units();

  // Ties are broken on the id-sorted member lists, compared as bit sets
  // over id rank; the spent change ranks after every utxo.
  std::vector<std::uint64_t> rank_bit(n);
  {
    std::vector<std::size_t> by_id(n);
    for (std::size_t i = 0; i < n; ++i) by_id[i] = i;
    std::sort(by_id.begin(), by_id.end(),
              [&](std::size_t x, std::size_t y) { return by_value[x]->id < by_value[y]->id; });
    for (std::size_t r = 0; r < n; ++r) rank_bit[by_id[r]] = std::uint64_t{1} << r;
  }
  const std::uint64_t change_bit = std::uint64_t{1} << n;
  auto ranked = [&](std::uint64_t m) {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1) out |= rank_bit[i];
    }
    return out;
  };
  // Lexicographic order of the sorted sequences behind two rank sets.
  auto lex_less = [](std::uint64_t x, std::uint64_t y) {
    const std::uint64_t d = x ^ y;
    if (d == 0) return false;
    const std::uint64_t low = d & (~d + 1);
    const std::uint64_t above = ~((low << 1) - 1);
    return (x & low) ? (y & above) != 0 : (x & above) == 0;
  };

  struct Candidate {
    double objective = std::numeric_limits<double>::infinity();
    std::size_t union_size = 0;
    std::uint64_t s1 = 0, s2 = 0;  // by_value bit sets
    std::uint64_t r1 = 0, r2 = 0;  // id rank bit sets, r2 with change_bit
    bool uses_change = false;
    bool linked = false;
  };
  std::optional<Candidate> best;

  auto better = [&](const Candidate& x, const Candidate& y) {
    constexpr double kEps = 1e-12;
    if (x.objective < y.objective - kEps) return true;
    if (x.objective > y.objective + kEps) return false;
    if (x.union_size != y.union_size) return x.union_size < y.union_size;
    if (x.r1 != y.r1) return lex_less(x.r1, y.r1);
    return lex_less(x.r2, y.r2);
  };

  // Address of each utxo as a bit, zero when it has none.
  std::vector<std::uint64_t> addr_bit(n, 0);
  {
    std::map<std::string_view, std::uint64_t> bits;
    for (std::size_t i = 0; i < n; ++i) {
      if (by_value[i]->address.empty()) continue;
      auto [it, fresh] = bits.emplace(by_value[i]->address, std::uint64_t{1} << bits.size());
      addr_bit[i] = it->second;
    }
  }
  std::vector<std::uint64_t> value(n);
  for (std::size_t i = 0; i < n; ++i) value[i] = by_value[i]->value.units();

  struct Cover {
    std::uint64_t mask;
    std::size_t count;
    bool shares_address;
  };

  // Gray-code walk: each step flips one utxo in or out of S1.
  std::uint64_t mask = 0, v1 = 0;
  std::vector<int> addr_count(n, 0);
  std::uint64_t addr1 = 0;
  for (std::uint64_t step = 1; step < (std::uint64_t{1} << n); ++step) {
    const auto flip = static_cast<std::size_t>(std::countr_zero(step));
    const std::uint64_t abit = addr_bit[flip];
    const auto aidx = abit ? static_cast<std::size_t>(std::countr_zero(abit)) : 0;
    mask ^= std::uint64_t{1} << flip;
    if (mask >> flip & 1) {
      v1 += value[flip];
      if (abit && addr_count[aidx]++ == 0) addr1 |= abit;
    } else {
      v1 -= value[flip];
      if (abit && --addr_count[aidx] == 0) addr1 &= ~abit;
    }
    if (v1 < t1) continue;
    const std::uint64_t c1 = v1 - t1;
    const std::size_t k1 = static_cast<std::size_t>(std::popcount(mask));
    // S2 holds at least one input besides S1.
    if (best && (1.0 - lambda) * static_cast<double>(k1 + 1) > best->objective + 1e-12) continue;

    // Largest-first prefix of the eligible rest covering `need`.
    auto cover = [&](std::uint64_t need, bool disjoint) -> std::optional<Cover> {
      Cover c{0, 0, false};
      std::uint64_t acc = 0;
      for (std::size_t i = 0; i < n && acc < need; ++i) {
        if (mask >> i & 1) continue;
        const bool shared = (addr_bit[i] & addr1) != 0;
        if (disjoint && shared) continue;
        c.mask |= std::uint64_t{1} << i;
        ++c.count;
        c.shares_address = c.shares_address || shared;
        acc += value[i];
      }
      if (acc < need) return std::nullopt;
      return c;
    };

    auto consider = [&](std::optional<Cover> s2, bool uses_change) {
      if (!s2) return;
      Candidate c;
      c.uses_change = uses_change;
      c.linked = uses_change || s2->shares_address;
      c.union_size = k1 + s2->count + (uses_change ? 1 : 0);
      c.objective = (1.0 - lambda) * static_cast<double>(c.union_size) + (c.linked ? lambda : 0.0);
      if (best) {
        if (c.objective > best->objective + 1e-12) return;
        if (c.objective >= best->objective - 1e-12 && c.union_size > best->union_size) return;
      }
      c.s1 = mask;
      c.s2 = s2->mask;
      c.r1 = ranked(mask);
      c.r2 = ranked(s2->mask) | (uses_change ? change_bit : 0);
      if (!best || better(c, *best)) best = c;
    };

    consider(cover(t2, true), false);
    consider(cover(t2, false), false);
    if (c1 > 0) consider(cover(c1 >= t2 ? 0 : t2 - c1, false), true);
  }
  if (!best) {
    throw SelectionError(ErrorCode::kInfeasible, "no disjoint selections cover both targets");
  }

  auto members_of = [&](std::uint64_t m) {
    std::vector<const Utxo*> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1) out.push_back(by_value[i]);
    }
    return out;
  };
  TwoPeriodResult out;
  out.first = detail::FeeFreeResult(members_of(best->s1), params.t1);
  auto& r2 = out.second;
  for (const Utxo* u : members_of(best->s2)) {
    r2.inputs.push_back(u->id);
    r2.input_value += u->value;
  }
  if (best->uses_change) r2.input_value += out.first.change_value;
  r2.change_value = r2.input_value - params.t2;
  r2.exact_match = r2.change_value.is_zero();
  out.second_spends_change = best->uses_change;
  out.union_size = best->union_size;
  out.linked = best->linked;
  out.objective = best->objective;
  return out;
}

// ---------------------------------------------------------------------------
// Greedy seeded genetic search.

// 1 / (value - target + count). Requires value >= target and count >= 1.
inline double fitness(std::span<const Amount> candidate, Amount target) {
  if (candidate.empty()) {
    throw SelectionError(ErrorCode::kInvalidArgument, "fitness of an empty candidate");
  }
  Amount value;
  for (Amount v : candidate) value += v;
  if (value < target) {
    throw SelectionError(ErrorCode::kInvalidArgument, "fitness of an infeasible candidate");
  }
  return 1.0 / static_cast<double>((value - target).units() + candidate.size());
}

struct GenerationReport {
  std::size_t generation = 0;
  std::uint64_t best_denominator = 0;  // fitness = 1 / best_denominator
  bool all_feasible = true;
  std::size_t evaluated = 0;
};

struct GeneticParams {
  std::size_t population = 50;
  std::size_t generations = 200;
  double crossover_prob = 0.8;
  double mutation_prob = 0.02;
  RngSeed seed;
  std::function<void(const GenerationReport&)> observer;
};

namespace detail {

class GeneticSearch {
 public:
  GeneticSearch(std::vector<const Utxo*> order, Amount target, const GeneticParams& params)
      : order_(std::move(order)), target_(target.units()), params_(params), rng_(params.seed) {
    std::uint64_t v = 0;
    while (min_count_ < order_.size() && v < target_) v += order_[min_count_++]->value.units();
  }

  using Chromosome = std::vector<char>;

  Chromosome Run(const Chromosome& greedy_seed) {
    std::vector<Chromosome> pop;
    pop.push_back(greedy_seed);
    while (pop.size() < params_.population) {
      Chromosome c(order_.size());
      for (auto& bit : c) bit = rng_.coin() ? 1 : 0;
      Repair(c);
      pop.push_back(std::move(c));
    }
    best_ = pop.front();
    best_den_ = Denominator(best_);
    Evaluate(pop, 0);
    for (std::size_t gen = 1; gen < params_.generations && !IsOptimal(); ++gen) {
      pop = Survivors(pop);
      for (std::size_t i = 0; i + 1 < pop.size(); i += 2) {
        if (rng_.bernoulli(params_.crossover_prob)) Crossover(pop[i], pop[i + 1]);
      }
      for (auto& c : pop) {
        Mutate(c);
        Repair(c);
      }
      Evaluate(pop, gen);
    }
    return best_;
  }

 private:
  std::uint64_t Value(const Chromosome& c) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i]) v += order_[i]->value.units();
    }
    return v;
  }

  std::uint64_t Denominator(const Chromosome& c) const {
    const auto count = static_cast<std::uint64_t>(std::count(c.begin(), c.end(), 1));
    return Value(c) - target_ + count;
  }

  // No individual can beat an exact match using as few inputs as the
  // largest-first prefix needs.
  bool IsOptimal() const { return best_den_ == min_count_; }

  // Adds the largest unselected utxos until the target is covered.
  void Repair(Chromosome& c) const {
    std::uint64_t v = Value(c);
    for (std::size_t i = 0; i < c.size() && v < target_; ++i) {
      if (!c[i]) {
        c[i] = 1;
        v += order_[i]->value.units();
      }
    }
  }

  void Evaluate(const std::vector<Chromosome>& pop, std::size_t gen) {
    GenerationReport report{gen, 0, true, pop.size()};
    for (const auto& c : pop) {
      if (Value(c) < target_) {
        report.all_feasible = false;
        continue;
      }
      const std::uint64_t d = Denominator(c);
      if (d < best_den_) {
        best_den_ = d;
        best_ = c;
      }
    }
    report.best_denominator = best_den_;
    if (params_.observer) params_.observer(report);
  }

  // Fitness-proportional (roulette wheel) resampling of the population.
  std::vector<Chromosome> Survivors(const std::vector<Chromosome>& pop) {
    std::vector<double> cumulative(pop.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      acc += 1.0 / static_cast<double>(Denominator(pop[i]));
      cumulative[i] = acc;
    }
    std::vector<Chromosome> next;
    next.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const double spin = rng_.unit() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), spin);
      const std::size_t pick = std::min<std::size_t>(it - cumulative.begin(), pop.size() - 1);
      next.push_back(pop[pick]);
    }
    return next;
  }

  void Crossover(Chromosome& a, Chromosome& b) {
    if (a.size() < 2) return;
    const std::size_t point = 1 + rng_.index(a.size() - 1);
    std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(point), a.end(),
                     b.begin() + static_cast<std::ptrdiff_t>(point));
  }

  void Mutate(Chromosome& c) {
    for (auto& bit : c) {
      if (rng_.bernoulli(params_.mutation_prob)) bit = bit ? 0 : 1;
    }
  }

  std::vector<const Utxo*> order_;
  std::uint64_t target_;
  const GeneticParams& params_;
  Rng rng_;
  Chromosome best_;
  std::uint64_t best_den_ = 0;
  std::uint64_t min_count_ = 0;
};

}  // namespace detail

// Whole pool when it matches the target exactly; the smallest
// single utxo covering the target when one exists; otherwise a genetic
// search over inclusion bitstrings (value-descending bit order) seeded
// with the greedy selection. Offspring that fall below the target are
// repaired by adding the largest unselected utxos.
inline SelectionResult select_greedy_genetic(const UtxoPool& pool, Amount target,
                                             const GeneticParams& params) {
  detail::RequireValidTarget(pool, target);
  if (params.population < 2 || params.generations < 1) {
    throw SelectionError(ErrorCode::kInvalidArgument,
                         "genetic search needs population >= 2 and generations >= 1");
  }
  if (pool.total_value() == target) return detail::FeeFreeResult(pool.members(), target);

  const Utxo* smallest_cover = nullptr;
  for (const auto& [id, u] : pool) {
    if (u.value >= target && (smallest_cover == nullptr || u.value < smallest_cover->value)) {
      smallest_cover = &u;
    }
  }
  if (smallest_cover != nullptr) {
    return detail::FeeFreeResult(std::vector<const Utxo*>{smallest_cover}, target);
  }

  auto order = PolicyOrder(pool, SortPolicy::Hvf());
  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]->id] = i;
  detail::GeneticSearch::Chromosome seed(order.size(), 0);
  for (const auto& id : select_greedy(pool, target).inputs) seed[position.at(id)] = 1;

  const auto best = detail::GeneticSearch(order, target, params).Run(seed);
  std::vector<const Utxo*> chosen;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (best[i]) chosen.push_back(order[i]);
  }
  return detail::FeeFreeResult(chosen, target);
}

}  // namespace coinsel
