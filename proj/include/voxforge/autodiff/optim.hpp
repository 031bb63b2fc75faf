// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "voxforge/autodiff/tensor.hpp"

namespace voxforge::ad {

struct AdamConfig {
    double lr{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double eps{1e-8};
};

// Adam with bias-corrected first and second moments.
class Adam {
public:
    Adam(std::vector<Tensor> params, AdamConfig cfg);

    // Applies one update from the current grads; parameters without a grad
    // are left untouched.
    void step();
    void zero_grad();

    const AdamConfig& config() const { return cfg_; }
    long steps() const { return t_; }

private:
    std::vector<Tensor> params_;
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    long t_{0};
};

void adam_step(Adam& opt);

}  // namespace voxforge::ad
