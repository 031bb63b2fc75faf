// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "voxforge/autodiff/init.hpp"
#include "voxforge/autodiff/checkpoint.hpp"
#include "voxforge/autodiff/ops.hpp"
#include "voxforge/voxel/voxel_grid.hpp"

// Recurrent 3D GAN: a shared per-view conv encoder, an LSTM that fuses the
// view features in order, a transposed-conv decoder with a two-layer
// refinement head, and a conv discriminator.
namespace voxforge::rgan {

struct RganConfig {
    int grid_dim{32};
    std::array<std::size_t, 5> encoder_channels{8, 16, 32, 64, 64};
    std::size_t latent{256};
    std::size_t lstm_hidden{256};
    std::array<std::size_t, 5> decoder_channels{64, 64, 32, 16, 8};
    std::array<std::size_t, 6> disc_channels{8, 16, 32, 64, 64, 1};
    double lambda_adv{0.1};
    double lr{1e-3};
    std::size_t batch{1};
    int epochs{500};
    std::uint64_t seed{0};
    // Views per training sequence are drawn from [min_views, available].
    std::size_t min_views{1};
    std::size_t max_views{8};

    // Throws DomainError on non-positive sizes or a grid_dim the layer
    // plan cannot mirror (a power of two in [2, 64]).
    void validate() const;
    friend bool operator==(const RganConfig&, const RganConfig&) = default;
};

// Kernel, stride and padding of one conv layer. Layers use k4 s2 p1 while
// the input is at least 2 wide. Once it has shrunk to 1 they use k1 s1 p0,
// which is what a padded k3 reduces to on a single cell.
struct ConvSpec {
    int kernel{4};
    int stride{2};
    int pad{1};
    int in_extent{0};
    int out_extent{0};
};
std::vector<ConvSpec> conv_plan(int grid_dim, std::size_t layers);

struct ConvLayer {
    ad::Tensor kernel;
    ad::Tensor bias;
    ConvSpec spec;
};

struct LinearLayer {
    ad::Tensor weight;
    ad::Tensor bias;
};

struct GeneratorModel {
    RganConfig config;
    std::vector<ConvLayer> encoder;
    LinearLayer flatten1;
    LinearLayer flatten2;
    ad::LstmParams lstm;
    std::vector<ConvLayer> decoder;  // transposed
    std::vector<ConvLayer> upscale;

    static GeneratorModel create(const RganConfig& cfg, ad::Rng& rng);
    std::vector<ad::NamedTensor> named_parameters() const;
    std::vector<ad::Tensor> parameters() const;
};

struct DiscriminatorModel {
    RganConfig config;
    std::vector<ConvLayer> layers;

    static DiscriminatorModel create(const RganConfig& cfg, ad::Rng& rng);
    std::vector<ad::NamedTensor> named_parameters() const;
    std::vector<ad::Tensor> parameters() const;
};

// Partial observations of one object, voxelized in the object's frame.
struct ViewSequence {
    std::vector<voxel::VoxelGrid> views;

    // Throws DomainError when empty, longer than max_views, or when frames
    // differ; ShapeError when the grid is not grid_dim cubed.
    void validate(const RganConfig& cfg) const;
    const voxel::Frame& frame() const { return views.front().frame(); }
};

// Occupancy probabilities in the grid's linear order.
struct ProbabilityGrid {
    voxel::Frame frame;
    std::vector<double> values;
};

// [1, 1, m, m, m] tensor of 0/1 occupancy.
ad::Tensor grid_tensor(const voxel::VoxelGrid& g);

// Feature vector [1, latent] for one view.
ad::Tensor encode_view(const voxel::VoxelGrid& g, const GeneratorModel& gen);
// Final LSTM hidden state [1, hidden] after one step per feature, from zero state.
ad::Tensor fuse_sequence(const std::vector<ad::Tensor>& features, const GeneratorModel& gen);
// Probabilities [1, 1, m, m, m], differentiable in the generator parameters.
ad::Tensor generate_tensor(const ViewSequence& views, const GeneratorModel& gen);
ProbabilityGrid generate(const ViewSequence& views, const GeneratorModel& gen);

struct Discrimination {
    ad::Tensor score;     // scalar in (0, 1)
    ad::Tensor features;  // output of the fifth layer, flattened
};
Discrimination discriminate(const ad::Tensor& grid, const DiscriminatorModel& dis);
// mean(features(fake)) - mean(features(real)).
ad::Tensor feature_mean_gap(const ad::Tensor& fake, const ad::Tensor& real, const DiscriminatorModel& dis);

// Thresholded generate(); values strictly above `threshold` are occupied.
voxel::VoxelGrid reconstruct(const ViewSequence& views, const GeneratorModel& gen, double threshold = 0.5);

}  // namespace voxforge::rgan
