// SPDX-License-Identifier: Apache-2.0

#include "voxforge/autodiff/init.hpp"

#include <cmath>

namespace voxforge::ad {

Tensor uniform(Shape shape, double bound, Rng& rng) {
    std::vector<double> data(shape_numel(shape));
    for (auto& v : data) v = (2.0 * unit_uniform(rng) - 1.0) * bound;
    return Tensor::from(std::move(shape), std::move(data), true);
}

Tensor he_uniform(Shape shape, std::size_t fan_in, Rng& rng) {
    return uniform(std::move(shape), std::sqrt(6.0 / static_cast<double>(fan_in)), rng);
}

}  // namespace voxforge::ad
