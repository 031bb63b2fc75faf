// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxforge/autodiff/tensor.hpp"
#include "voxforge/util/random.hpp"

namespace voxforge::ad {

using util::Rng;
using util::uniform_index;
using util::unit_uniform;

// U(-a, a) with a = sqrt(6 / fan_in).
Tensor he_uniform(Shape shape, std::size_t fan_in, Rng& rng);
Tensor uniform(Shape shape, double bound, Rng& rng);

}  // namespace voxforge::ad
