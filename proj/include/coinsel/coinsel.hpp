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

#include "coinsel/advanced.hpp"
#include "coinsel/algorithms.hpp"
#include "coinsel/amount.hpp"
#include "coinsel/basic.hpp"
#include "coinsel/domain.hpp"
#include "coinsel/error.hpp"
#include "coinsel/exact.hpp"
#include "coinsel/io.hpp"
#include "coinsel/primitive.hpp"
#include "coinsel/rng.hpp"
#include "coinsel/simulator.hpp"
