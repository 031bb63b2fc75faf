// SPDX-License-Identifier: Apache-2.0

#include "voxforge/rgan/model.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "voxforge/error.hpp"
#include "voxforge/voxel/convert.hpp"

namespace voxforge::rgan {

using ad::Tensor;

void RganConfig::validate() const {
    if (grid_dim < 2 || grid_dim > 64 || !std::has_single_bit(static_cast<unsigned>(grid_dim)))
        throw DomainError("grid_dim must be a power of two in [2, 64], got " + std::to_string(grid_dim));
    for (auto c : encoder_channels)
        if (c == 0) throw DomainError("encoder channel counts must be positive");
    for (auto c : decoder_channels)
        if (c == 0) throw DomainError("decoder channel counts must be positive");
    for (auto c : disc_channels)
        if (c == 0) throw DomainError("discriminator channel counts must be positive");
    if (latent == 0 || lstm_hidden == 0) throw DomainError("latent and lstm_hidden must be positive");
    const int e = conv_plan(grid_dim, 5).back().out_extent;
    const auto cells = static_cast<std::size_t>(e) * e * e;
    if (lstm_hidden % cells != 0)
        throw DomainError("lstm_hidden must be divisible by " + std::to_string(cells) + " for grid_dim " +
                          std::to_string(grid_dim));
    if (lambda_adv < 0.0) throw DomainError("lambda_adv must be non-negative");
    if (!(lr > 0.0)) throw DomainError("lr must be positive");
    if (batch == 0) throw DomainError("batch must be positive");
    if (epochs < 0) throw DomainError("epochs must be non-negative");
    if (min_views == 0 || max_views < min_views) throw DomainError("need 1 <= min_views <= max_views");
}

std::vector<ConvSpec> conv_plan(int grid_dim, std::size_t layers) {
    std::vector<ConvSpec> plan;
    int e = grid_dim;
    for (std::size_t i = 0; i < layers; ++i) {
        ConvSpec s = e >= 2 ? ConvSpec{4, 2, 1, e, 0} : ConvSpec{1, 1, 0, e, 0};
        s.out_extent = (e + 2 * s.pad - s.kernel) / s.stride + 1;
        e = s.out_extent;
        plan.push_back(s);
    }
    return plan;
}

namespace {

// Mean number of kernel taps per output along one axis that land inside
// the input. Padding and small extents make this far smaller than k, and
// He init should count only the taps that carry signal.
double taps_per_axis(const ConvSpec& spec, bool transposed) {
    // A forward conv links coarse cell c to fine cell f through tap k when
    // f = c*s - p + k. Transposed layers keep the mirrored spec with the
    // extents swapped, so their input is the coarse side.
    const int coarse = transposed ? spec.in_extent : spec.out_extent;
    const int fine = transposed ? spec.out_extent : spec.in_extent;
    long links = 0;
    for (int c = 0; c < coarse; ++c)
        for (int k = 0; k < spec.kernel; ++k) {
            const int f = c * spec.stride - spec.pad + k;
            links += (f >= 0 && f < fine) ? 1 : 0;
        }
    return static_cast<double>(links) / static_cast<double>(transposed ? fine : coarse);
}

Tensor he_kernel(ad::Shape shape, std::size_t c_in, const ConvSpec& spec, bool transposed, ad::Rng& rng) {
    const double t = taps_per_axis(spec, transposed);
    return ad::uniform(std::move(shape), std::sqrt(6.0 / (static_cast<double>(c_in) * t * t * t)), rng);
}

ConvLayer make_conv(std::size_t c_in, std::size_t c_out, const ConvSpec& spec, ad::Rng& rng) {
    const auto k = static_cast<std::size_t>(spec.kernel);
    return {he_kernel({c_out, c_in, k, k, k}, c_in, spec, false, rng), Tensor::zeros({c_out}, true), spec};
}

// Transposed layers read the kernel as [c_in, c_out, k, k, k] and keep
// the spec of the forward conv they mirror, with extents swapped.
ConvLayer make_transposed(std::size_t c_in, std::size_t c_out, const ConvSpec& spec, ad::Rng& rng) {
    const auto k = static_cast<std::size_t>(spec.kernel);
    return {he_kernel({c_in, c_out, k, k, k}, c_in, spec, true, rng), Tensor::zeros({c_out}, true), spec};
}

LinearLayer make_linear(std::size_t in, std::size_t out, ad::Rng& rng) {
    return {ad::he_uniform({out, in}, in, rng), Tensor::zeros({out}, true)};
}

void add_conv(std::vector<ad::NamedTensor>& out, const std::string& prefix, const std::vector<ConvLayer>& layers) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        out.emplace_back(prefix + std::to_string(i) + ".kernel", layers[i].kernel);
        out.emplace_back(prefix + std::to_string(i) + ".bias", layers[i].bias);
    }
}

std::vector<Tensor> values(const std::vector<ad::NamedTensor>& named) {
    std::vector<Tensor> out;
    out.reserve(named.size());
    for (const auto& [_, t] : named) out.push_back(t);
    return out;
}

Tensor conv(const Tensor& x, const ConvLayer& l) { return ad::conv3d(x, l.kernel, l.bias, l.spec.stride, l.spec.pad); }

Tensor conv_t(const Tensor& x, const ConvLayer& l) {
    return ad::conv3d_transpose(x, l.kernel, l.bias, l.spec.stride, l.spec.pad);
}

}  // namespace

GeneratorModel GeneratorModel::create(const RganConfig& cfg, ad::Rng& rng) {
    cfg.validate();
    GeneratorModel g;
    g.config = cfg;
    const auto plan = conv_plan(cfg.grid_dim, 5);
    std::size_t c = 1;
    for (std::size_t i = 0; i < 5; ++i) {
        g.encoder.push_back(make_conv(c, cfg.encoder_channels[i], plan[i], rng));
        c = cfg.encoder_channels[i];
    }
    const auto e = static_cast<std::size_t>(plan.back().out_extent);
    g.flatten1 = make_linear(c * e * e * e, cfg.latent, rng);
    g.flatten2 = make_linear(cfg.latent, cfg.latent, rng);

    // U(+-1/sqrt(H)) with the forget bias at +1 so early steps keep state.
    const std::size_t h = cfg.lstm_hidden;
    const double bound = 1.0 / std::sqrt(static_cast<double>(h));
    const ad::Shape ws{h, cfg.latent + h};
    g.lstm.w_i = ad::uniform(ws, bound, rng);
    g.lstm.w_f = ad::uniform(ws, bound, rng);
    g.lstm.w_o = ad::uniform(ws, bound, rng);
    g.lstm.w_s = ad::uniform(ws, bound, rng);
    g.lstm.b_i = Tensor::zeros({h}, true);
    g.lstm.b_f = Tensor::full({h}, 1.0, true);
    g.lstm.b_o = Tensor::zeros({h}, true);
    g.lstm.b_s = Tensor::zeros({h}, true);

    c = h / (e * e * e);
    for (std::size_t j = 0; j < 5; ++j) {
        ConvSpec spec = plan[4 - j];
        std::swap(spec.in_extent, spec.out_extent);
        g.decoder.push_back(make_transposed(c, cfg.decoder_channels[j], spec, rng));
        c = cfg.decoder_channels[j];
    }
    const ConvSpec same{3, 1, 1, cfg.grid_dim, cfg.grid_dim};
    g.upscale.push_back(make_conv(c, c, same, rng));
    g.upscale.push_back(make_conv(c, 1, same, rng));
    return g;
}

std::vector<ad::NamedTensor> GeneratorModel::named_parameters() const {
    std::vector<ad::NamedTensor> out;
    add_conv(out, "gen.encoder", encoder);
    out.emplace_back("gen.flatten1.weight", flatten1.weight);
    out.emplace_back("gen.flatten1.bias", flatten1.bias);
    out.emplace_back("gen.flatten2.weight", flatten2.weight);
    out.emplace_back("gen.flatten2.bias", flatten2.bias);
    out.emplace_back("gen.lstm.w_i", lstm.w_i);
    out.emplace_back("gen.lstm.w_f", lstm.w_f);
    out.emplace_back("gen.lstm.w_o", lstm.w_o);
    out.emplace_back("gen.lstm.w_s", lstm.w_s);
    out.emplace_back("gen.lstm.b_i", lstm.b_i);
    out.emplace_back("gen.lstm.b_f", lstm.b_f);
    out.emplace_back("gen.lstm.b_o", lstm.b_o);
    out.emplace_back("gen.lstm.b_s", lstm.b_s);
    add_conv(out, "gen.decoder", decoder);
    add_conv(out, "gen.upscale", upscale);
    return out;
}

std::vector<Tensor> GeneratorModel::parameters() const { return values(named_parameters()); }

DiscriminatorModel DiscriminatorModel::create(const RganConfig& cfg, ad::Rng& rng) {
    cfg.validate();
    DiscriminatorModel d;
    d.config = cfg;
    const auto plan = conv_plan(cfg.grid_dim, 6);
    std::size_t c = 1;
    for (std::size_t i = 0; i < 6; ++i) {
        d.layers.push_back(make_conv(c, cfg.disc_channels[i], plan[i], rng));
        c = cfg.disc_channels[i];
    }
    return d;
}

std::vector<ad::NamedTensor> DiscriminatorModel::named_parameters() const {
    std::vector<ad::NamedTensor> out;
    add_conv(out, "dis.layer", layers);
    return out;
}

std::vector<Tensor> DiscriminatorModel::parameters() const { return values(named_parameters()); }

void ViewSequence::validate(const RganConfig& cfg) const {
    if (views.empty()) throw DomainError("view sequence is empty");
    if (views.size() > cfg.max_views)
        throw DomainError("view sequence has " + std::to_string(views.size()) + " views, limit is " +
                          std::to_string(cfg.max_views));
    for (const auto& v : views) {
        if (v.frame().dims != voxel::Dims::cube(cfg.grid_dim))
            throw ShapeError("view grid is not " + std::to_string(cfg.grid_dim) + " cubed");
        if (v.frame() != views.front().frame()) throw DomainError("views of one sequence must share a frame");
    }
}

Tensor grid_tensor(const voxel::VoxelGrid& g) {
    const auto& d = g.frame().dims;
    return Tensor::from({1, 1, static_cast<std::size_t>(d.z), static_cast<std::size_t>(d.y),
                         static_cast<std::size_t>(d.x)},
                        voxel::to_dense(g));
}

Tensor encode_view(const voxel::VoxelGrid& g, const GeneratorModel& gen) {
    if (g.frame().dims != voxel::Dims::cube(gen.config.grid_dim))
        throw ShapeError("encode_view: grid is not " + std::to_string(gen.config.grid_dim) + " cubed");
    Tensor x = grid_tensor(g);
    for (const auto& l : gen.encoder) x = ad::relu(conv(x, l));
    x = ad::reshape(x, {1, x.numel()});
    x = ad::relu(ad::linear(x, gen.flatten1.weight, gen.flatten1.bias));
    return ad::linear(x, gen.flatten2.weight, gen.flatten2.bias);
}

Tensor fuse_sequence(const std::vector<Tensor>& features, const GeneratorModel& gen) {
    if (features.empty()) throw DomainError("fuse_sequence: empty sequence");
    const std::size_t h = gen.config.lstm_hidden;
    ad::LstmState state{Tensor::zeros({1, h}), Tensor::zeros({1, h})};
    for (const auto& f : features) state = ad::lstm_cell(f, state, gen.lstm);
    return state.h;
}

Tensor generate_tensor(const ViewSequence& views, const GeneratorModel& gen) {
    views.validate(gen.config);
    std::vector<Tensor> features;
    features.reserve(views.views.size());
    for (const auto& v : views.views) features.push_back(encode_view(v, gen));
    Tensor x = fuse_sequence(features, gen);
    const auto e = static_cast<std::size_t>(gen.decoder.front().spec.in_extent);
    x = ad::reshape(x, {1, gen.config.lstm_hidden / (e * e * e), e, e, e});
    for (const auto& l : gen.decoder) x = ad::relu(conv_t(x, l));
    x = ad::relu(conv(x, gen.upscale[0]));
    return ad::sigmoid(conv(x, gen.upscale[1]));
}

ProbabilityGrid generate(const ViewSequence& views, const GeneratorModel& gen) {
    const Tensor y = generate_tensor(views, gen);
    return {views.frame(), std::vector<double>(y.data().begin(), y.data().end())};
}

Discrimination discriminate(const Tensor& grid, const DiscriminatorModel& dis) {
    const auto m = static_cast<std::size_t>(dis.config.grid_dim);
    if (grid.shape() != ad::Shape{1, 1, m, m, m})
        throw ShapeError("discriminate: expected [1, 1, " + std::to_string(m) + ", ...], got " +
                         ad::shape_str(grid.shape()));
    Tensor x = grid;
    Tensor features;
    for (std::size_t i = 0; i < dis.layers.size(); ++i) {
        x = conv(x, dis.layers[i]);
        if (i + 1 < dis.layers.size()) {
            x = ad::relu(x);
            if (i + 2 == dis.layers.size()) features = ad::reshape(x, {x.numel()});
        }
    }
    return {ad::sigmoid(ad::mean(x)), features};
}

Tensor feature_mean_gap(const Tensor& fake, const Tensor& real, const DiscriminatorModel& dis) {
    if (fake.shape() != real.shape())
        throw ShapeError("feature_mean_gap: " + ad::shape_str(fake.shape()) + " vs " + ad::shape_str(real.shape()));
    return ad::sub(ad::mean(discriminate(fake, dis).features), ad::mean(discriminate(real, dis).features));
}

voxel::VoxelGrid reconstruct(const ViewSequence& views, const GeneratorModel& gen, double threshold) {
    const auto p = generate(views, gen);
    return voxel::threshold(p.values, p.frame, threshold);
}

}  // namespace voxforge::rgan
