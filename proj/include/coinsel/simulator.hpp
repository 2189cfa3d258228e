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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "coinsel/algorithms.hpp"
#include "coinsel/domain.hpp"
#include "coinsel/rng.hpp"

namespace coinsel::sim {

enum class WorkloadKind { kNormal, kPoisson };

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kNormal;
  double mean = 1000;
  double stddev = 250;  // normal only

  static WorkloadSpec Normal(double mean, double stddev) { return {WorkloadKind::kNormal, mean, stddev}; }
  static WorkloadSpec Poisson(double mean) { return {WorkloadKind::kPoisson, mean, 0}; }

  void validate() const {
    if (!(mean > 0)) throw SelectionError(ErrorCode::kInvalidArgument, "workload mean must be positive");
    if (kind == WorkloadKind::kNormal && !(stddev >= 0)) {
      throw SelectionError(ErrorCode::kInvalidArgument, "workload stddev must be non-negative");
    }
  }
};

// A positive integer draw. Normal draws are rounded and redrawn until
// positive; Poisson draws of zero are redrawn as well.
inline Amount sample(const WorkloadSpec& w, Rng& rng) {
  while (true) {
    if (w.kind == WorkloadKind::kNormal) {
      const double x = std::round(rng.normal(w.mean, w.stddev));
      if (x >= 1.0) return Amount(static_cast<std::uint64_t>(x));
    } else {
      const std::uint64_t k = rng.poisson(w.mean);
      if (k > 0) return Amount(k);
    }
  }
}

struct SimConfig {
  Amount initial_balance{100000};
  std::size_t iterations = 10000;
  std::size_t deposits_per_iteration = 3;
  WorkloadSpec deposit_workload = WorkloadSpec::Normal(1000, 250);
  WorkloadSpec target_workload = WorkloadSpec::Normal(3000, 500);
  AlgorithmConfig algorithm;
  RngSeed workload_seed{1};
  RngSeed algorithm_seed{2};
  Amount dust_threshold{100};
  bool fees_on = false;
  FeeParams fee;

  void validate() const {
    if (initial_balance.is_zero()) {
      throw SelectionError(ErrorCode::kInvalidArgument, "initial_balance must be positive");
    }
    deposit_workload.validate();
    target_workload.validate();
    fee.validate();
  }
};

inline constexpr std::uint64_t kValueBucketWidth = 50;
inline constexpr std::uint64_t kValueHistogramMax = 2000;

// What happened in one iteration.
struct IterationEvent {
  Amount target;
  Amount deposits;
  bool paid = false;
  std::size_t inputs = 0;
  Amount change;
  Amount fee;
};

struct MetricsReport {
  std::string algorithm;
  std::vector<std::size_t> pool_size_series;   // iterations + 1 entries
  std::vector<std::size_t> dust_count_series;  // iterations + 1 entries
  std::vector<Amount> pool_value_series;       // iterations + 1 entries
  std::vector<IterationEvent> events;          // one per iteration
  std::map<std::size_t, std::uint64_t> input_count_histogram;
  std::vector<std::uint64_t> value_histogram;  // 40 buckets of 50, then overflow
  std::uint64_t insufficient_events = 0;
  std::uint64_t selection_failures = 0;
  std::uint64_t transactions = 0;
  Amount total_fees;
  Amount final_pool_value;
  UtxoPool final_pool;
  SimConfig config;

  double mean_inputs() const {
    std::uint64_t inputs = 0;
    for (const auto& [k, count] : input_count_histogram) inputs += k * count;
    return transactions == 0 ? 0.0 : static_cast<double>(inputs) / static_cast<double>(transactions);
  }
  std::size_t max_inputs() const {
    return input_count_histogram.empty() ? 0 : input_count_histogram.rbegin()->first;
  }
};

inline std::vector<std::uint64_t> ValueHistogram(const UtxoPool& pool) {
  std::vector<std::uint64_t> buckets(kValueHistogramMax / kValueBucketWidth + 1, 0);
  for (const auto& [id, u] : pool) {
    const std::uint64_t b = std::min<std::uint64_t>(u.value.units() / kValueBucketWidth,
                                                    buckets.size() - 1);
    ++buckets[b];
  }
  return buckets;
}

namespace detail {

inline std::string SerialId(char prefix, std::uint64_t iteration, int slot = -1) {
  char buf[48];
  if (slot < 0) {
    std::snprintf(buf, sizeof buf, "%c%08llu", prefix, static_cast<unsigned long long>(iteration));
  } else {
    std::snprintf(buf, sizeof buf, "%c%08llu-%02d", prefix,
                  static_cast<unsigned long long>(iteration), slot);
  }
  return buf;
}

inline std::size_t CountBelow(const UtxoPool& pool, Amount threshold) {
  std::size_t n = 0;
  for (const auto& [id, u] : pool) n += u.value < threshold ? 1 : 0;
  return n;
}

// Runs a fee-unaware selector against target + fee, raising the fee
// estimate until the chosen inputs also pay for their own bytes.
inline SelectionResult SelectWithFees(const Selector& select, const UtxoPool& pool, Amount target,
                                      RngSeed seed, const FeeParams& fee) {
  Amount estimate = fee.cost_of(tx_size(1, 1, true, fee));
  for (int attempt = 0; attempt < 16; ++attempt) {
    SelectionResult r = select(pool, target + estimate, seed);
    std::uint64_t bytes = fee.header_bytes + 2ull * fee.output_bytes;
    for (const auto& id : r.inputs) bytes += pool.find(id)->size_bytes;
    const Amount needed = fee.cost_of(bytes);
    if (r.input_value >= target + needed) {
      r.fee_paid = needed;
      r.change_value = r.input_value - target - needed;
      r.exact_match = r.change_value.is_zero();
      return r;
    }
    estimate = needed;
  }
  throw SelectionError(ErrorCode::kInsufficientFunds, "fee estimate did not converge");
}

}  // namespace detail

// One wallet run. Each iteration ages every utxo by one, draws a target
// and the deposits from the workload stream, pays the target if the
// balance allows, returns the change as a fresh utxo and adds the
// deposits. The workload stream depends only on workload_seed, so every
// algorithm sees the same targets and deposits.
inline MetricsReport run_simulation(const SimConfig& config) {
  config.validate();
  MetricsReport report;
  report.config = config;
  report.algorithm = std::string(AlgorithmName(config.algorithm.id));
  const FeeParams fee = config.fees_on ? config.fee : FeeParams{};
  const Selector select = MakeSelector(config.algorithm, fee);
  const bool self_fees = IsFeeAware(config.algorithm.id);

  UtxoPool pool;
  pool.add(Utxo{"u00000000", config.initial_balance, 148, 0, "addr-u00000000"});
  Rng workload(config.workload_seed);
  Rng algo(config.algorithm_seed);

  report.pool_size_series.reserve(config.iterations + 1);
  report.dust_count_series.reserve(config.iterations + 1);
  report.pool_value_series.reserve(config.iterations + 1);
  report.events.reserve(config.iterations);
  auto record = [&] {
    report.pool_size_series.push_back(pool.size());
    report.dust_count_series.push_back(detail::CountBelow(pool, config.dust_threshold));
    report.pool_value_series.push_back(pool.total_value());
  };
  record();

  std::vector<Amount> deposits(config.deposits_per_iteration);
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    pool.age_all(1);
    const Amount target = sample(config.target_workload, workload);
    for (auto& d : deposits) d = sample(config.deposit_workload, workload);
    const RngSeed seed = algo.derive();
    IterationEvent event;
    event.target = target;

    if (pool.total_value() < target) {
      ++report.insufficient_events;
    } else {
      try {
        SelectionResult r = (config.fees_on && !self_fees)
                                ? detail::SelectWithFees(select, pool, target, seed, fee)
                                : select(pool, target, seed);
        for (const auto& id : r.inputs) pool.remove(id);
        if (!r.change_value.is_zero()) {
          const std::string id = detail::SerialId('c', it);
          pool.add(Utxo{id, r.change_value, fee.input_bytes, 0, "addr-" + id});
        }
        ++report.input_count_histogram[r.inputs.size()];
        ++report.transactions;
        report.total_fees += r.fee_paid;
        event.paid = true;
        event.inputs = r.inputs.size();
        event.change = r.change_value;
        event.fee = r.fee_paid;
      } catch (const SelectionError& e) {
        if (e.code() == ErrorCode::kInsufficientFunds) {
          ++report.insufficient_events;
        } else {
          ++report.selection_failures;
        }
      }
    }
    for (std::size_t k = 0; k < deposits.size(); ++k) {
      const std::string id = detail::SerialId('d', it, static_cast<int>(k));
      pool.add(Utxo{id, deposits[k], fee.input_bytes, 0, "addr-" + id});
      event.deposits += deposits[k];
    }
    report.events.push_back(event);
    record();
  }
  report.value_histogram = ValueHistogram(pool);
  report.final_pool_value = pool.total_value();
  report.final_pool = std::move(pool);
  return report;
}

// ---------------------------------------------------------------------------
// Export.

inline nlohmann::ordered_json SummaryJson(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["iterations"] = r.config.iterations;
  j["initial_balance"] = r.config.initial_balance.units();
  j["workload_seed"] = r.config.workload_seed.value;
  j["algorithm_seed"] = r.config.algorithm_seed.value;
  j["final_pool_size"] = r.final_pool.size();
  j["final_pool_value"] = r.final_pool_value.units();
  j["dust_threshold"] = r.config.dust_threshold.units();
  j["final_dust_count"] = r.dust_count_series.empty() ? 0 : r.dust_count_series.back();
  j["transactions"] = r.transactions;
  j["mean_inputs"] = r.mean_inputs();
  j["max_inputs"] = r.max_inputs();
  j["insufficient_events"] = r.insufficient_events;
  j["selection_failures"] = r.selection_failures;
  j["total_fees"] = r.total_fees.units();
  return j;
}

inline std::string PoolSizeCsv(const MetricsReport& r) {
  std::ostringstream os;
  os << "iteration,size\n";
  for (std::size_t i = 0; i < r.pool_size_series.size(); ++i) os << i << ',' << r.pool_size_series[i] << '\n';
  return os.str();
}

inline std::string InputCountsCsv(const MetricsReport& r) {
  std::ostringstream os;
  os << "inputs,transactions\n";
  for (const auto& [k, count] : r.input_count_histogram) os << k << ',' << count << '\n';
  return os.str();
}

inline std::string ValueHistogramCsv(const MetricsReport& r) {
  std::ostringstream os;
  os << "bucket_low,bucket_high,count\n";
  for (std::size_t b = 0; b < r.value_histogram.size(); ++b) {
    const std::uint64_t low = b * kValueBucketWidth;
    os << low << ',';
    if (low >= kValueHistogramMax) {
      os << "inf";
    } else {
      os << low + kValueBucketWidth;
    }
    os << ',' << r.value_histogram[b] << '\n';
  }
  return os.str();
}

inline std::string DustCsv(const MetricsReport& r) {
  std::ostringstream os;
  os << "iteration,count\n";
  for (std::size_t i = 0; i < r.dust_count_series.size(); ++i) os << i << ',' << r.dust_count_series[i] << '\n';
  return os.str();
}

inline void WriteFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline void export_metrics(const MetricsReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  WriteFile(dir / "pool_size.csv", PoolSizeCsv(r));
  WriteFile(dir / "input_counts.csv", InputCountsCsv(r));
  WriteFile(dir / "value_histogram.csv", ValueHistogramCsv(r));
  WriteFile(dir / "dust.csv", DustCsv(r));
  WriteFile(dir / "summary.json", SummaryJson(r).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Campaigns: independent scenarios fanned out over worker threads. Results
// come back in scenario order regardless of completion order.

struct ScenarioOutcome {
  std::optional<MetricsReport> report;
  std::string error;
};

inline std::vector<ScenarioOutcome> RunCampaign(const std::vector<SimConfig>& scenarios,
                                                unsigned threads = std::thread::hardware_concurrency()) {
  std::vector<ScenarioOutcome> out(scenarios.size());
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next == scenarios.size()) return;
        i = next++;
      }
      try {
        out[i].report = run_simulation(scenarios[i]);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(scenarios.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace coinsel::sim
