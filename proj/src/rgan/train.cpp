// SPDX-License-Identifier: Apache-2.0

#include "voxforge/rgan/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "voxforge/error.hpp"
#include "voxforge/util/format.hpp"
#include "voxforge/rgan/config_io.hpp"
#include "voxforge/voxel/metrics.hpp"

namespace voxforge::rgan {

using ad::Tensor;

namespace {

ad::Rng seeded(std::uint64_t seed, std::uint64_t stream) { return ad::Rng(seed * 0x9E3779B97F4A7C15ULL + stream); }

GeneratorModel fresh_generator(const RganConfig& cfg) {
    auto rng = seeded(cfg.seed, 1);
    return GeneratorModel::create(cfg, rng);
}

DiscriminatorModel fresh_discriminator(const RganConfig& cfg) {
    auto rng = seeded(cfg.seed, 2);
    return DiscriminatorModel::create(cfg, rng);
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite ") + what + " during training");
}

ViewSequence prefix(const ViewSequence& s, std::size_t k) {
    return ViewSequence{std::vector<voxel::VoxelGrid>(s.views.begin(), s.views.begin() + static_cast<long>(k))};
}

StepLosses step(std::span<const Sample* const> batch, Trainer& t, bool sample_views) {
    if (batch.empty()) throw DomainError("train_step: empty batch");
    const RganConfig& cfg = t.config();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const double pos_w = positive_weight(batch);

    std::vector<Tensor> fakes;
    std::vector<Tensor> reals;
    for (const Sample* s : batch) {
        std::size_t k = std::min(s->views.views.size(), cfg.max_views);
        if (sample_views && k > cfg.min_views) k = cfg.min_views + ad::uniform_index(t.rng, k - cfg.min_views + 1);
        fakes.push_back(generate_tensor(prefix(s->views, k), t.gen));
        reals.push_back(grid_tensor(s->truth));
    }

    StepLosses out;
    const Tensor one = Tensor::scalar(1.0);
    const Tensor zero = Tensor::scalar(0.0);
    t.dis_opt.zero_grad();
    Tensor dis_loss;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Tensor term = ad::add(ad::bce_loss(discriminate(reals[i], t.dis).score, one),
                                    ad::bce_loss(discriminate(fakes[i].detach(), t.dis).score, zero));
        dis_loss = dis_loss.defined() ? ad::add(dis_loss, term) : term;
    }
    dis_loss = ad::scale(dis_loss, inv_b);
    out.dis = dis_loss.item();
    require_finite(out.dis, "discriminator loss");
    ad::backward(dis_loss);
    t.dis_opt.step();

    t.gen_opt.zero_grad();
    Tensor recon;
    Tensor adv;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Tensor r = ad::bce_loss(fakes[i], reals[i], pos_w);
        recon = recon.defined() ? ad::add(recon, r) : r;
        if (cfg.lambda_adv > 0.0) {
            const Tensor a = ad::abs(feature_mean_gap(fakes[i], reals[i], t.dis));
            adv = adv.defined() ? ad::add(adv, a) : a;
        }
    }
    recon = ad::scale(recon, inv_b);
    out.gen_recon = recon.item();
    require_finite(out.gen_recon, "generator reconstruction loss");
    Tensor gen_loss = recon;
    if (adv.defined()) {
        adv = ad::scale(adv, inv_b);
        out.gen_adv = adv.item();
        require_finite(out.gen_adv, "generator adversarial loss");
        gen_loss = ad::add(recon, ad::scale(adv, cfg.lambda_adv));
    }
    ad::backward(gen_loss);
    t.gen_opt.step();
    // The feature-matching pass leaves gradients on the discriminator.
    t.dis_opt.zero_grad();
    return out;
}

}  // namespace

Trainer::Trainer(const RganConfig& cfg) : Trainer(fresh_generator(cfg), fresh_discriminator(cfg), cfg.seed) {}

Trainer::Trainer(GeneratorModel g, DiscriminatorModel d, std::uint64_t stream_seed)
    : gen(std::move(g)),
      dis(std::move(d)),
      gen_opt(gen.parameters(), ad::AdamConfig{gen.config.lr}),
      dis_opt(dis.parameters(), ad::AdamConfig{gen.config.lr}),
      rng(seeded(stream_seed, 3)) {
    if (gen.config != dis.config) throw DomainError("generator and discriminator configs differ");
}

double positive_weight(std::span<const Sample* const> batch) {
    std::size_t occupied = 0;
    std::size_t total = 0;
    for (const Sample* s : batch) {
        occupied += s->truth.count();
        total += s->truth.size();
    }
    if (occupied == 0) return 50.0;
    return std::clamp(static_cast<double>(total - occupied) / static_cast<double>(occupied), 1.0, 50.0);
}

StepLosses train_step(std::span<const Sample* const> batch, Trainer& t) { return step(batch, t, true); }

StepLosses train_step_all_views(std::span<const Sample* const> batch, Trainer& t) { return step(batch, t, false); }

double mean_iou(std::span<const Sample> samples, const GeneratorModel& gen) {
    if (samples.empty()) throw DomainError("mean_iou: no samples");
    double total = 0.0;
    for (const auto& s : samples) total += voxel::iou(reconstruct(s.views, gen), s.truth);
    return total / static_cast<double>(samples.size());
}

TrainResult train(std::span<const Sample> dataset, const RganConfig& cfg, const TrainOptions& opts) {
    if (dataset.empty()) throw DomainError("train: empty dataset");
    for (const auto& s : dataset) {
        s.views.validate(cfg);
        if (s.truth.frame() != s.views.frame()) throw DomainError("sample '" + s.name + "': truth frame differs");
    }
    Trainer t(cfg);
    std::vector<EpochLog> log;
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[ad::uniform_index(t.rng, i)]);
        EpochLog e;
        e.epoch = epoch;
        std::size_t steps = 0;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch) {
            std::vector<const Sample*> batch;
            for (std::size_t i = b; i < std::min(order.size(), b + cfg.batch); ++i) batch.push_back(&dataset[order[i]]);
            const auto l = train_step(batch, t);
            e.gen_recon_loss += l.gen_recon;
            e.gen_adv_loss += l.gen_adv;
            e.dis_loss += l.dis;
            ++steps;
        }
        e.gen_recon_loss /= static_cast<double>(steps);
        e.gen_adv_loss /= static_cast<double>(steps);
        e.dis_loss /= static_cast<double>(steps);
        e.mean_train_iou = mean_iou(dataset, t.gen);
        log.push_back(e);
        if (opts.on_epoch) opts.on_epoch(e);
        const bool stop = opts.stop_at_iou > 0.0 && e.mean_train_iou >= opts.stop_at_iou;
        if (!opts.checkpoint_dir.empty() && opts.checkpoint_every > 0 &&
            (epoch % opts.checkpoint_every == 0 || stop || epoch == cfg.epochs))
            save_checkpoint(opts.checkpoint_dir, t.gen, t.dis, epoch);
        if (stop) break;
    }
    return {std::move(t.gen), std::move(t.dis), std::move(log)};
}

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log) {
    out << "epoch,gen_recon_loss,gen_adv_loss,dis_loss,mean_train_iou\n";
    for (const auto& e : log)
        out << e.epoch << ',' << util::format_number(e.gen_recon_loss) << ',' << util::format_number(e.gen_adv_loss) << ',' << util::format_number(e.dis_loss) << ','
            << util::format_number(e.mean_train_iou) << '\n';
}

void save_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_training_log(out, log);
    if (!out) throw IoError("failed writing " + path.string());
}

void save_checkpoint(const std::filesystem::path& dir, const GeneratorModel& gen, const DiscriminatorModel& dis,
                     int epoch) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    ad::save_tensors(dir / "generator.tnsr", gen.named_parameters());
    ad::save_tensors(dir / "discriminator.tnsr", dis.named_parameters());
    const nlohmann::json sidecar = {{"format", "voxforge-rgan"}, {"epoch", epoch}, {"config", config_to_json(gen.config)}};
    std::ofstream out(dir / "rgan.json");
    if (!out) throw IoError("cannot write " + (dir / "rgan.json").string());
    out << sidecar.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    std::ifstream in(dir / "rgan.json");
    if (!in) throw IoError("cannot open " + (dir / "rgan.json").string());
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError((dir / "rgan.json").string() + ": " + e.what());
    }
    if (!sidecar.is_object() || sidecar.value("format", "") != "voxforge-rgan" || !sidecar.contains("config"))
        throw IoError((dir / "rgan.json").string() + ": not an R-GAN checkpoint sidecar");
    const RganConfig cfg = config_from_json(sidecar.at("config"));
    Checkpoint c{fresh_generator(cfg), fresh_discriminator(cfg), sidecar.value("epoch", 0)};
    ad::assign_tensors(ad::load_tensors(dir / "generator.tnsr"), c.gen.named_parameters());
    ad::assign_tensors(ad::load_tensors(dir / "discriminator.tnsr"), c.dis.named_parameters());
    return c;
}

}  // namespace voxforge::rgan
