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

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "coinsel/error.hpp"

namespace coinsel {

// A non-negative quantity of the ledger's smallest unit. Arithmetic is
// checked: overflow and underflow raise kOverflow instead of wrapping.
class Amount {
 public:
  using rep = std::uint64_t;

  constexpr Amount() = default;
  constexpr explicit Amount(rep units) : units_(units) {}

  constexpr rep units() const noexcept { return units_; }
  constexpr bool is_zero() const noexcept { return units_ == 0; }

  static constexpr Amount max() { return Amount(std::numeric_limits<rep>::max()); }

  friend constexpr auto operator<=>(Amount, Amount) = default;

  Amount& operator+=(Amount rhs) {
    if (units_ > std::numeric_limits<rep>::max() - rhs.units_) {
      throw SelectionError(ErrorCode::kOverflow,
                           "amount addition overflows " + std::to_string(units_) +
                               " + " + std::to_string(rhs.units_));
    }
    units_ += rhs.units_;
    return *this;
  }

  Amount& operator-=(Amount rhs) {
    if (rhs.units_ > units_) {
      throw SelectionError(ErrorCode::kOverflow,
                           "amount subtraction underflows " + std::to_string(units_) +
                               " - " + std::to_string(rhs.units_));
    }
    units_ -= rhs.units_;
    return *this;
  }

  friend Amount operator+(Amount a, Amount b) { return a += b; }
  friend Amount operator-(Amount a, Amount b) { return a -= b; }

  // Scales by a byte count or similar factor.
  friend Amount operator*(Amount a, std::uint64_t k) {
    if (k != 0 && a.units_ > std::numeric_limits<rep>::max() / k) {
      throw SelectionError(ErrorCode::kOverflow, "amount multiplication overflows");
    }
    return Amount(a.units_ * k);
  }

  friend std::ostream& operator<<(std::ostream& os, Amount a) { return os << a.units_; }

 private:
  rep units_ = 0;
};

// Signed counterpart used for effective values, which may go negative.
using SignedAmount = std::int64_t;

inline SignedAmount ToSigned(Amount a) {
  if (a.units() > static_cast<Amount::rep>(std::numeric_limits<SignedAmount>::max())) {
    throw SelectionError(ErrorCode::kOverflow, "amount does not fit a signed value");
  }
  return static_cast<SignedAmount>(a.units());
}

inline Amount AbsDiff(Amount a, Amount b) { return a >= b ? a - b : b - a; }

namespace literals {
constexpr Amount operator""_u(unsigned long long v) { return Amount(v); }
}  // namespace literals

}  // namespace coinsel
