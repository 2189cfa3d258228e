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

// coinsel: run one selection, a simulation, or an algorithm comparison.
//
//   coinsel select pool.json --algo greedy --target 40
//   coinsel simulate --config sim.json --out run/
//   coinsel compare --config sim.json --algos fifo,lifo,hvf --out cmp/

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "coinsel/coinsel.hpp"

namespace {

using namespace coinsel;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct SelectArgs {
  std::string pool_file;
  std::string algo;
  std::uint64_t target = 0;
  std::uint64_t seed = 0;
  std::int64_t rounds = 1000;
  unsigned repeats = kDefaultKnapsackRepeats;
  std::size_t max_inputs = 100;
  std::uint64_t fee_per_byte = 0;
  std::uint64_t min_change = 0;
  std::string branch_policy = "randomized";
  double gamma = 0.5;
  double lambda = 0.5;
  std::size_t population = 50;
  std::size_t generations = 200;
  std::uint64_t t2 = 0;
};

struct SimulateArgs {
  std::string config;
  std::string out;
  std::string algo;
  std::optional<std::uint64_t> workload_seed;
  std::optional<std::uint64_t> seed;
};

struct CompareArgs {
  std::string config;
  std::string out;
  std::vector<std::string> algos;
  std::optional<std::uint64_t> workload_seed;
  unsigned threads = 0;
};

void PrintJson(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int RunSelect(const SelectArgs& a) {
  const auto id = ParseAlgorithm(a.algo);
  if (!id) {
    std::cerr << "unknown algorithm '" << a.algo << "'\n";
    return kExitUsage;
  }
  UtxoPool pool;
  try {
    pool = io::LoadPool(a.pool_file);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  AlgorithmConfig c;
  c.id = *id;
  c.rounds = a.rounds;
  c.repeats = a.repeats;
  c.max_inputs = a.max_inputs;
  c.min_change = Amount(a.min_change);
  c.branch_policy = a.branch_policy == "inclusion_first" ? BranchPolicy::kInclusionFirst
                                                         : BranchPolicy::kRandomized;
  c.gamma = a.gamma;
  c.lambda = a.lambda;
  c.population = a.population;
  c.generations = a.generations;
  c.t2 = Amount(a.t2);
  FeeParams fee;
  fee.fee_per_byte = Amount(a.fee_per_byte);

  const Amount target(a.target);
  const RngSeed seed{a.seed};
  try {
    if (c.id == AlgorithmId::kMyopic || c.id == AlgorithmId::kStrategic) {
      const Amount t2 = c.t2.is_zero() ? target : c.t2;
      const TwoPeriodResult r =
          c.id == AlgorithmId::kMyopic ? select_myopic(pool, target, t2)
                                       : select_strategic(pool, StrategicParams{c.lambda, target, t2});
      ordered_json j = io::ToJson(r.first);
      j["second"] = io::ToJson(r.second);
      j["second_spends_change"] = r.second_spends_change;
      j["union_size"] = r.union_size;
      j["linked"] = r.linked;
      j["objective"] = r.objective;
      PrintJson(j);
      return kExitOk;
    }
    const Selector select = MakeSelector(c, fee);
    const SelectionResult r = (!fee.fee_per_byte.is_zero() && !IsFeeAware(c.id))
                                  ? sim::detail::SelectWithFees(select, pool, target, seed, fee)
                                  : select(pool, target, seed);
    PrintJson(io::ToJson(r));
    return kExitOk;
  } catch (const SelectionError& e) {
    std::cerr << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitFailed;
  }
}

sim::SimConfig LoadConfig(const std::string& path) {
  return path.empty() ? sim::SimConfig{} : io::LoadSimConfig(path);
}

int RunSimulate(const SimulateArgs& a) {
  sim::SimConfig config;
  try {
    config = LoadConfig(a.config);
    if (!a.algo.empty()) {
      const auto id = ParseAlgorithm(a.algo);
      if (!id) throw SelectionError(ErrorCode::kInvalidArgument, "unknown algorithm '" + a.algo + "'");
      config.algorithm.id = *id;
    }
    if (a.workload_seed) config.workload_seed.value = *a.workload_seed;
    if (a.seed) config.algorithm_seed.value = *a.seed;
    const sim::MetricsReport report = sim::run_simulation(config);
    sim::export_metrics(report, a.out);
    std::cout << sim::SummaryJson(report).dump() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitFailed;
  }
}

std::string CombinedPoolSizeCsv(const std::vector<sim::MetricsReport>& reports) {
  std::ostringstream os;
  os << "iteration";
  for (const auto& r : reports) os << ',' << r.algorithm;
  os << '\n';
  const std::size_t rows = reports.front().pool_size_series.size();
  for (std::size_t i = 0; i < rows; ++i) {
    os << i;
    for (const auto& r : reports) os << ',' << r.pool_size_series[i];
    os << '\n';
  }
  return os.str();
}

std::string CombinedInputCountsCsv(const std::vector<sim::MetricsReport>& reports) {
  std::set<std::size_t> keys;
  for (const auto& r : reports) {
    for (const auto& [k, n] : r.input_count_histogram) keys.insert(k);
  }
  std::ostringstream os;
  os << "inputs";
  for (const auto& r : reports) os << ',' << r.algorithm;
  os << '\n';
  for (std::size_t k : keys) {
    os << k;
    for (const auto& r : reports) {
      auto it = r.input_count_histogram.find(k);
      os << ',' << (it == r.input_count_histogram.end() ? 0 : it->second);
    }
    os << '\n';
  }
  return os.str();
}

int RunCompare(const CompareArgs& a) {
  if (a.algos.size() < 2) {
    std::cerr << "compare needs at least two algorithms\n";
    return kExitUsage;
  }
  std::set<std::string> seen;
  for (const auto& name : a.algos) {
    if (!ParseAlgorithm(name)) {
      std::cerr << "unknown algorithm '" << name << "'\n";
      return kExitFailed;
    }
    if (!seen.insert(name).second) {
      std::cerr << "algorithm '" << name << "' listed twice\n";
      return kExitUsage;
    }
  }
  try {
    sim::SimConfig base = LoadConfig(a.config);
    if (a.workload_seed) base.workload_seed.value = *a.workload_seed;
    std::vector<sim::SimConfig> scenarios;
    for (const auto& name : a.algos) {
      sim::SimConfig c = base;
      c.algorithm.id = *ParseAlgorithm(name);
      scenarios.push_back(c);
    }
    const unsigned threads = a.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : a.threads;
    auto outcomes = sim::RunCampaign(scenarios, threads);

    std::vector<sim::MetricsReport> reports;
    int status = kExitOk;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (!outcomes[i].report) {
        std::cerr << "scenario '" << a.algos[i] << "' failed: " << outcomes[i].error << "\n";
        status = kExitFailed;
        continue;
      }
      reports.push_back(std::move(*outcomes[i].report));
    }
    if (status != kExitOk) return status;

    const std::filesystem::path out(a.out);
    ordered_json summary = ordered_json::array();
    for (const auto& r : reports) {
      sim::export_metrics(r, out / r.algorithm);
      summary.push_back(sim::SummaryJson(r));
    }
    sim::WriteFile(out / "pool_size.csv", CombinedPoolSizeCsv(reports));
    sim::WriteFile(out / "input_counts.csv", CombinedInputCountsCsv(reports));
    sim::WriteFile(out / "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UTXO coin selection toolkit"};
  app.require_subcommand(1);

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "Select inputs from a pool file for one target");
  select->add_option("pool", sel.pool_file, "JSON array of utxos")->required();
  select->add_option("--algo", sel.algo, "Algorithm name")->required();
  select->add_option("--target", sel.target, "Payment target")->required();
  select->add_option("--seed", sel.seed, "Seed for randomized selectors");
  select->add_option("--rounds", sel.rounds, "BnB search rounds");
  select->add_option("--repeats", sel.repeats, "Knapsack attempts");
  select->add_option("--max-inputs", sel.max_inputs, "Random-improve input limit");
  select->add_option("--fee-per-byte", sel.fee_per_byte, "Fee rate");
  select->add_option("--min-change", sel.min_change, "BnB fallback minimum change");
  select->add_option("--branch-policy", sel.branch_policy, "BnB branch order")
      ->check(CLI::IsMember({"randomized", "inclusion_first"}));
  select->add_option("--gamma", sel.gamma, "ILP size slack");
  select->add_option("--lambda", sel.lambda, "Strategic privacy weight");
  select->add_option("--population", sel.population, "Genetic population size");
  select->add_option("--generations", sel.generations, "Genetic generations");
  select->add_option("--t2", sel.t2, "Second-period target for myopic and strategic");

  SimulateArgs simargs;
  auto* simulate = app.add_subcommand("simulate", "Run one wallet simulation and export its metrics");
  simulate->add_option("--config", simargs.config, "Simulation config JSON");
  simulate->add_option("--out", simargs.out, "Output directory")->required();
  simulate->add_option("--algo", simargs.algo, "Override the configured algorithm");
  simulate->add_option("--workload-seed", simargs.workload_seed, "Override the workload seed");
  simulate->add_option("--seed", simargs.seed, "Override the algorithm seed");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Run several algorithms on one workload");
  compare->add_option("--config", cmp.config, "Simulation config JSON");
  compare->add_option("--algos", cmp.algos, "Comma separated algorithm names")->required()->delimiter(',');
  compare->add_option("--out", cmp.out, "Output directory")->required();
  compare->add_option("--workload-seed", cmp.workload_seed, "Override the workload seed");
  compare->add_option("--threads", cmp.threads, "Worker threads, 0 for one per core");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*select) return RunSelect(sel);
  if (*simulate) return RunSimulate(simargs);
  return RunCompare(cmp);
}
