// Copyright 2026 The GaussianFace Authors
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

#include "gaussianface/errors.hpp"

#include <atomic>
#include <iostream>

namespace gf {

namespace {
std::atomic<bool> g_warnings{true};
}

void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

void warn(const std::string& message) {
  if (g_warnings.load(std::memory_order_relaxed)) std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings.store(enabled, std::memory_order_relaxed); }

}  // namespace gf
