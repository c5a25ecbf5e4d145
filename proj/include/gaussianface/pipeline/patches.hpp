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

#pragma once

#include <utility>
#include <vector>

namespace gf {

/// Overlapping square patches over an image, enumerated row-major.
struct PatchGrid {
  int image_height = 0;
  int image_width = 0;
  int patch_size = 0;
  int stride = 0;
  std::vector<std::pair<int, int>> positions;  ///< (row, col) of each top-left corner

  [[nodiscard]] int count() const noexcept { return static_cast<int>(positions.size()); }
};

/// P = (floor((H - patch)/stride) + 1) * (floor((W - patch)/stride) + 1).
/// Throws ContractViolation if the patch does not fit or stride < 1.
[[nodiscard]] PatchGrid patch_grid(int height, int width, int patch, int stride);

}  // namespace gf
