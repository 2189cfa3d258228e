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

#include <cstddef>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace coinsel {

struct RngSeed {
  std::uint64_t value = 0;
};

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; distributions come from Boost.Random
// rather than <random> because the standard leaves distribution algorithms
// to the implementation.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  std::uint64_t next_u64() { return engine_(); }
  RngSeed derive() { return RngSeed{engine_()}; }

  // Uniform in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    boost::random::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  bool bernoulli(double p) { return unit() < p; }

  double unit() { return boost::random::uniform_01<double>()(engine_); }

  double normal(double mean, double stddev) {
    boost::random::normal_distribution<double> dist(mean, stddev);
    return dist(engine_);
  }

  std::uint64_t poisson(double mean) {
    boost::random::poisson_distribution<std::uint64_t, double> dist(mean);
    return dist(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace coinsel
