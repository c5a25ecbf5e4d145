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

#include "gaussianface/pipeline/patches.hpp"

#include "gaussianface/errors.hpp"

namespace gf {

PatchGrid patch_grid(int height, int width, int patch, int stride) {
  require(patch >= 1, "patch size must be positive");
  require(stride >= 1, "stride must be at least 1");
  require(patch <= height && patch <= width, "patch does not fit inside the image");
  PatchGrid g;
  g.image_height = height;
  g.image_width = width;
  g.patch_size = patch;
  g.stride = stride;
  for (int r = 0; r + patch <= height; r += stride) {
    for (int c = 0; c + patch <= width; c += stride) g.positions.emplace_back(r, c);
  }
  return g;
}

}  // namespace gf
