// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "voxforge/autodiff/optim.hpp"
#include "voxforge/rgan/model.hpp"

namespace voxforge::rgan {

struct Sample {
    std::string name;
    ViewSequence views;
    voxel::VoxelGrid truth;
};

struct StepLosses {
    double gen_recon{0.0};
    double gen_adv{0.0};
    double dis{0.0};
};

// Models, their optimizers and the stream used for view sampling and
// shuffling. Everything training touches lives here so a run is a pure
// function of the seed.
struct Trainer {
    GeneratorModel gen;
    DiscriminatorModel dis;
    ad::Adam gen_opt;
    ad::Adam dis_opt;
    ad::Rng rng;

    explicit Trainer(const RganConfig& cfg);
    Trainer(GeneratorModel g, DiscriminatorModel d, std::uint64_t stream_seed);
    const RganConfig& config() const { return gen.config; }
};

// Weight for occupied voxels: #empty / #occupied over the batch, clamped
// to [1, 50].
double positive_weight(std::span<const Sample* const> batch);

// One discriminator update on real/fake BCE followed by one generator
// update on weighted voxel BCE plus lambda_adv * |feature_mean_gap|.
// Each sample uses the first k of its views, k drawn from
// [min_views, available]. Throws DomainError on an empty batch or a
// non-finite loss.
StepLosses train_step(std::span<const Sample* const> batch, Trainer& t);
// Same, with the full view sequence of every sample.
StepLosses train_step_all_views(std::span<const Sample* const> batch, Trainer& t);

struct EpochLog {
    int epoch{0};
    double gen_recon_loss{0.0};
    double gen_adv_loss{0.0};
    double dis_loss{0.0};
    double mean_train_iou{0.0};
};

struct TrainOptions {
    // Empty disables checkpoints.
    std::filesystem::path checkpoint_dir;
    int checkpoint_every{0};
    // Stop once mean_train_iou reaches this value; 0 disables.
    double stop_at_iou{0.0};
    std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
    GeneratorModel gen;
    DiscriminatorModel dis;
    std::vector<EpochLog> log;
};

// Mean IoU of reconstruct() over the samples using all their views.
double mean_iou(std::span<const Sample> samples, const GeneratorModel& gen);

TrainResult train(std::span<const Sample> dataset, const RganConfig& cfg, const TrainOptions& opts = {});

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log);
void save_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log);

// Writes <dir>/generator.tnsr, <dir>/discriminator.tnsr and <dir>/rgan.json.
void save_checkpoint(const std::filesystem::path& dir, const GeneratorModel& gen, const DiscriminatorModel& dis,
                     int epoch);
struct Checkpoint {
    GeneratorModel gen;
    DiscriminatorModel dis;
    int epoch{0};
};
// Throws IoError for missing or malformed files and ShapeError when the
// tensors do not fit the stored config.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace voxforge::rgan
