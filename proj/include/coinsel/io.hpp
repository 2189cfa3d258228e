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

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "coinsel/algorithms.hpp"
#include "coinsel/domain.hpp"
#include "coinsel/simulator.hpp"

// JSON shapes for pool files, simulation configs and selection results.
namespace coinsel::io {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void Bad(const std::string& what) {
  throw SelectionError(ErrorCode::kInvalidArgument, what);
}

inline void RejectUnknownKeys(const json& obj, std::initializer_list<std::string_view> known,
                              std::string_view where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) Bad("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
T Unsigned(const json& obj, std::string_view key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned()) {
    Bad("'" + std::string(key) + "' must be a non-negative integer");
  }
  return it->template get<T>();
}

inline double Number(const json& obj, std::string_view key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) Bad("'" + std::string(key) + "' must be a number");
  return it->get<double>();
}

inline Amount AmountField(const json& obj, std::string_view key, Amount fallback) {
  return Amount(Unsigned<std::uint64_t>(obj, key, fallback.units()));
}

}  // namespace detail

inline json ToJson(const Utxo& u) {
  return {{"id", u.id}, {"value", u.value.units()}, {"size", u.size_bytes},
          {"age", u.age}, {"address", u.address}};
}

inline UtxoPool ParsePool(const json& doc) {
  if (!doc.is_array()) detail::Bad("pool file must hold a JSON array");
  UtxoPool pool;
  for (const auto& item : doc) {
    if (!item.is_object()) detail::Bad("pool entries must be objects");
    detail::RejectUnknownKeys(item, {"id", "value", "size", "age", "address"}, "pool entry");
    if (!item.contains("id") || !item["id"].is_string()) detail::Bad("pool entry needs a string 'id'");
    if (!item.contains("value")) detail::Bad("pool entry '" + item["id"].get<std::string>() + "' needs 'value'");
    Utxo u;
    u.id = item["id"].get<std::string>();
    u.value = detail::AmountField(item, "value", Amount(0));
    u.size_bytes = detail::Unsigned<std::uint32_t>(item, "size", 148);
    u.age = detail::Unsigned<std::uint64_t>(item, "age", 0);
    if (auto it = item.find("address"); it != item.end()) {
      if (!it->is_string()) detail::Bad("'address' must be a string");
      u.address = it->get<std::string>();
    }
    pool.add(std::move(u));
  }
  return pool;
}

inline json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::Bad("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    detail::Bad("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline UtxoPool LoadPool(const std::string& path) { return ParsePool(ReadJsonFile(path)); }

inline nlohmann::ordered_json ToJson(const SelectionResult& r) {
  nlohmann::ordered_json j;
  j["inputs"] = r.inputs;
  j["input_value"] = r.input_value.units();
  j["change_value"] = r.change_value.units();
  j["fee_paid"] = r.fee_paid.units();
  j["exact_match"] = r.exact_match;
  return j;
}

// --- fee parameters -------------------------------------------------------

inline FeeParams ParseFee(const json& j) {
  if (!j.is_object()) detail::Bad("'fee' must be an object");
  detail::RejectUnknownKeys(j, {"fee_per_byte", "header_bytes", "input_bytes", "output_bytes",
                                "dust_threshold", "min_change", "change_output_bytes",
                                "max_tx_bytes", "max_overpay"},
                            "fee");
  FeeParams f;
  f.fee_per_byte = detail::AmountField(j, "fee_per_byte", f.fee_per_byte);
  f.header_bytes = detail::Unsigned<std::uint32_t>(j, "header_bytes", f.header_bytes);
  f.input_bytes = detail::Unsigned<std::uint32_t>(j, "input_bytes", f.input_bytes);
  f.output_bytes = detail::Unsigned<std::uint32_t>(j, "output_bytes", f.output_bytes);
  f.dust_threshold = detail::AmountField(j, "dust_threshold", f.dust_threshold);
  f.min_change = detail::AmountField(j, "min_change", f.min_change);
  f.change_output_bytes = detail::Unsigned<std::uint32_t>(j, "change_output_bytes", f.change_output_bytes);
  f.max_tx_bytes = detail::Unsigned<std::uint32_t>(j, "max_tx_bytes", f.max_tx_bytes);
  f.max_overpay = detail::AmountField(j, "max_overpay", f.max_overpay);
  f.validate();
  return f;
}

inline nlohmann::ordered_json ToJson(const FeeParams& f) {
  nlohmann::ordered_json j;
  j["fee_per_byte"] = f.fee_per_byte.units();
  j["header_bytes"] = f.header_bytes;
  j["input_bytes"] = f.input_bytes;
  j["output_bytes"] = f.output_bytes;
  j["dust_threshold"] = f.dust_threshold.units();
  j["min_change"] = f.min_change.units();
  j["change_output_bytes"] = f.change_output_bytes;
  j["max_tx_bytes"] = f.max_tx_bytes;
  j["max_overpay"] = f.max_overpay.units();
  return j;
}

// --- simulation config ----------------------------------------------------

inline sim::WorkloadSpec ParseWorkload(const json& j, std::string_view where) {
  if (!j.is_object()) detail::Bad(std::string(where) + " must be an object");
  detail::RejectUnknownKeys(j, {"kind", "mean", "stddev"}, where);
  sim::WorkloadSpec w;
  const std::string kind = j.value("kind", std::string("normal"));
  if (kind == "normal") {
    w.kind = sim::WorkloadKind::kNormal;
  } else if (kind == "poisson") {
    w.kind = sim::WorkloadKind::kPoisson;
  } else {
    detail::Bad(std::string(where) + ".kind must be 'normal' or 'poisson'");
  }
  if (!j.contains("mean")) detail::Bad(std::string(where) + " needs 'mean'");
  w.mean = detail::Number(j, "mean", 0);
  w.stddev = detail::Number(j, "stddev", w.kind == sim::WorkloadKind::kNormal ? -1 : 0);
  if (w.kind == sim::WorkloadKind::kNormal && !j.contains("stddev")) {
    detail::Bad(std::string(where) + " needs 'stddev' for a normal workload");
  }
  w.validate();
  return w;
}

inline nlohmann::ordered_json ToJson(const sim::WorkloadSpec& w) {
  nlohmann::ordered_json j;
  j["kind"] = w.kind == sim::WorkloadKind::kNormal ? "normal" : "poisson";
  j["mean"] = w.mean;
  if (w.kind == sim::WorkloadKind::kNormal) j["stddev"] = w.stddev;
  return j;
}

inline AlgorithmConfig ParseAlgorithmConfig(const json& j) {
  AlgorithmConfig c;
  const json obj = j.is_string() ? json{{"id", j}} : j;
  if (!obj.is_object()) detail::Bad("'algorithm' must be a name or an object");
  detail::RejectUnknownKeys(obj, {"id", "rounds", "repeats", "max_inputs", "min_change",
                                  "branch_policy", "gamma", "lambda", "population", "generations",
                                  "crossover_prob", "mutation_prob", "t2", "window_largest",
                                  "window_random"},
                            "algorithm");
  if (!obj.contains("id") || !obj["id"].is_string()) detail::Bad("algorithm needs a string 'id'");
  const auto id = ParseAlgorithm(obj["id"].get<std::string>());
  if (!id) detail::Bad("unknown algorithm '" + obj["id"].get<std::string>() + "'");
  c.id = *id;
  c.rounds = static_cast<std::int64_t>(detail::Unsigned<std::uint64_t>(obj, "rounds", c.rounds));
  c.repeats = detail::Unsigned<unsigned>(obj, "repeats", c.repeats);
  c.max_inputs = detail::Unsigned<std::size_t>(obj, "max_inputs", c.max_inputs);
  c.min_change = detail::AmountField(obj, "min_change", c.min_change);
  if (auto it = obj.find("branch_policy"); it != obj.end()) {
    if (*it == "randomized") {
      c.branch_policy = BranchPolicy::kRandomized;
    } else if (*it == "inclusion_first") {
      c.branch_policy = BranchPolicy::kInclusionFirst;
    } else {
      detail::Bad("branch_policy must be 'randomized' or 'inclusion_first'");
    }
  }
  c.gamma = detail::Number(obj, "gamma", c.gamma);
  c.lambda = detail::Number(obj, "lambda", c.lambda);
  c.population = detail::Unsigned<std::size_t>(obj, "population", c.population);
  c.generations = detail::Unsigned<std::size_t>(obj, "generations", c.generations);
  c.crossover_prob = detail::Number(obj, "crossover_prob", c.crossover_prob);
  c.mutation_prob = detail::Number(obj, "mutation_prob", c.mutation_prob);
  c.t2 = detail::AmountField(obj, "t2", c.t2);
  c.window_largest = detail::Unsigned<std::size_t>(obj, "window_largest", c.window_largest);
  c.window_random = detail::Unsigned<std::size_t>(obj, "window_random", c.window_random);
  return c;
}

inline nlohmann::ordered_json ToJson(const AlgorithmConfig& c) {
  nlohmann::ordered_json j;
  j["id"] = AlgorithmName(c.id);
  j["rounds"] = c.rounds;
  j["repeats"] = c.repeats;
  j["max_inputs"] = c.max_inputs;
  j["min_change"] = c.min_change.units();
  j["branch_policy"] = c.branch_policy == BranchPolicy::kRandomized ? "randomized" : "inclusion_first";
  j["gamma"] = c.gamma;
  j["lambda"] = c.lambda;
  j["population"] = c.population;
  j["generations"] = c.generations;
  j["crossover_prob"] = c.crossover_prob;
  j["mutation_prob"] = c.mutation_prob;
  j["t2"] = c.t2.units();
  j["window_largest"] = c.window_largest;
  j["window_random"] = c.window_random;
  return j;
}

inline sim::SimConfig ParseSimConfig(const json& j) {
  if (!j.is_object()) detail::Bad("config must be a JSON object");
  detail::RejectUnknownKeys(j, {"initial_balance", "iterations", "deposits_per_iteration",
                                "deposit_workload", "target_workload", "algorithm",
                                "workload_seed", "algorithm_seed", "dust_threshold", "fee_mode",
                                "fee"},
                            "config");
  sim::SimConfig c;
  c.initial_balance = detail::AmountField(j, "initial_balance", c.initial_balance);
  c.iterations = detail::Unsigned<std::size_t>(j, "iterations", c.iterations);
  c.deposits_per_iteration = detail::Unsigned<std::size_t>(j, "deposits_per_iteration", c.deposits_per_iteration);
  if (j.contains("deposit_workload")) c.deposit_workload = ParseWorkload(j["deposit_workload"], "deposit_workload");
  if (j.contains("target_workload")) c.target_workload = ParseWorkload(j["target_workload"], "target_workload");
  if (j.contains("algorithm")) c.algorithm = ParseAlgorithmConfig(j["algorithm"]);
  c.workload_seed.value = detail::Unsigned<std::uint64_t>(j, "workload_seed", c.workload_seed.value);
  c.algorithm_seed.value = detail::Unsigned<std::uint64_t>(j, "algorithm_seed", c.algorithm_seed.value);
  c.dust_threshold = detail::AmountField(j, "dust_threshold", c.dust_threshold);
  if (auto it = j.find("fee_mode"); it != j.end()) {
    if (*it == "off") {
      c.fees_on = false;
    } else if (*it == "on") {
      c.fees_on = true;
    } else {
      detail::Bad("fee_mode must be 'off' or 'on'");
    }
  }
  if (j.contains("fee")) c.fee = ParseFee(j["fee"]);
  c.validate();
  return c;
}

inline nlohmann::ordered_json ToJson(const sim::SimConfig& c) {
  nlohmann::ordered_json j;
  j["initial_balance"] = c.initial_balance.units();
  j["iterations"] = c.iterations;
  j["deposits_per_iteration"] = c.deposits_per_iteration;
  j["deposit_workload"] = ToJson(c.deposit_workload);
  j["target_workload"] = ToJson(c.target_workload);
  j["algorithm"] = ToJson(c.algorithm);
  j["workload_seed"] = c.workload_seed.value;
  j["algorithm_seed"] = c.algorithm_seed.value;
  j["dust_threshold"] = c.dust_threshold.units();
  j["fee_mode"] = c.fees_on ? "on" : "off";
  j["fee"] = ToJson(c.fee);
  return j;
}

inline sim::SimConfig LoadSimConfig(const std::string& path) { return ParseSimConfig(ReadJsonFile(path)); }

}  // namespace coinsel::io
