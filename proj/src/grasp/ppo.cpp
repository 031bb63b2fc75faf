// SPDX-License-Identifier: Apache-2.0

#include "voxforge/grasp/ppo.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "voxforge/autodiff/init.hpp"
#include "voxforge/autodiff/ops.hpp"
#include "voxforge/error.hpp"
#include "voxforge/kernels/dense.hpp"

namespace voxforge::grasp {

using ad::Tensor;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

DenseLayer glorot(std::size_t in, std::size_t out, util::Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    return {ad::uniform({out, in}, bound, rng), Tensor::zeros({out}, true)};
}

Mlp make_mlp(std::size_t in, std::size_t hidden, std::size_t out, bool zero_head, util::Rng& rng) {
    Mlp m;
    m.layers.push_back(glorot(in, hidden, rng));
    m.layers.push_back(glorot(hidden, hidden, rng));
    m.layers.push_back(zero_head ? DenseLayer{Tensor::zeros({out, hidden}, true), Tensor::zeros({out}, true)}
                                 : glorot(hidden, out, rng));
    return m;
}

Tensor rows_tensor(std::size_t cols, const PpoBatch& batch, std::span<const std::size_t> rows, bool actions) {
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (std::size_t r : rows) {
        const auto& s = batch.steps[r];
        if (actions)
            data.insert(data.end(), s.u.begin(), s.u.end());
        else
            data.insert(data.end(), s.observation.begin(), s.observation.end());
    }
    return Tensor::from({rows.size(), cols}, std::move(data));
}

Tensor column(std::span<const std::size_t> rows, auto get) {
    std::vector<double> data;
    data.reserve(rows.size());
    for (std::size_t r : rows) data.push_back(get(r));
    return Tensor::from({rows.size()}, std::move(data));
}

// log N(u; mean, exp(log_std)) per row, [n].
Tensor gaussian_log_prob(const Tensor& mean, const Tensor& log_std, const Tensor& u) {
    const std::size_t n = mean.dim(0);
    const std::size_t k = mean.dim(1);
    const Tensor ls = ad::expand_rows(log_std, n);
    const Tensor z = ad::mul(ad::sub(u, mean), ad::exp(ad::neg(ls)));
    const Tensor quad = ad::scale(ad::row_sum(ad::square(z)), 0.5);
    return ad::add_scalar(ad::neg(ad::add(quad, ad::row_sum(ls))), -0.5 * static_cast<double>(k) * kLog2Pi);
}

}  // namespace

void PpoConfig::validate() const {
    if (!(clip > 0.0 && clip < 1.0)) throw DomainError("ppo clip must be in (0, 1)");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("ppo gamma must be in (0, 1]");
    if (!(gae_lambda > 0.0 && gae_lambda <= 1.0)) throw DomainError("ppo gae_lambda must be in (0, 1]");
    if (update_epochs < 1 || minibatch == 0 || hidden == 0 || episodes < 1 || episodes_per_batch < 1 ||
        eval_episodes < 0)
        throw DomainError("ppo counts must be positive");
    if (!(lr > 0.0) || !(action_scale > 0.0)) throw DomainError("ppo lr and action_scale must be positive");
    if (entropy_coef < 0.0 || value_coef < 0.0) throw DomainError("ppo loss coefficients must be non-negative");
}

Tensor Mlp::forward(const Tensor& x) const {
    Tensor h = x;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        h = ad::linear(h, layers[i].weight, layers[i].bias);
        if (i + 1 < layers.size()) h = ad::tanh(h);
    }
    return h;
}

std::vector<double> Mlp::evaluate(std::span<const double> x) const {
    std::vector<double> h(x.begin(), x.end());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        std::vector<double> y(l.weight.dim(0));
        kernels::reference::linear_forward(1, l.weight.dim(1), l.weight.dim(0), h, l.weight.data(), l.bias.data(), y);
        if (i + 1 < layers.size())
            for (auto& v : y) v = std::tanh(v);
        h = std::move(y);
    }
    return h;
}

std::vector<Tensor> Mlp::parameters() const {
    std::vector<Tensor> out;
    for (const auto& l : layers) {
        out.push_back(l.weight);
        out.push_back(l.bias);
    }
    return out;
}

std::vector<Tensor> Policy::parameters() const {
    auto out = mean.parameters();
    out.push_back(log_std);
    return out;
}

Policy make_policy(const PpoConfig& cfg, util::Rng& rng) {
    cfg.validate();
    return {make_mlp(kObservationSize, cfg.hidden, kFingers, true, rng),
            Tensor::full({kFingers}, cfg.init_log_std, true)};
}

ValueFunction make_value_function(const PpoConfig& cfg, util::Rng& rng) {
    cfg.validate();
    return {make_mlp(kObservationSize, cfg.hidden, 1, false, rng)};
}

double log_prob(const Policy& policy, std::span<const double> observation, std::span<const double> u) {
    const auto mean = policy.mean.evaluate(observation);
    double lp = 0.0;
    for (std::size_t j = 0; j < kFingers; ++j) {
        const double ls = policy.log_std.data()[j];
        const double z = (u[j] - mean[j]) * std::exp(-ls);
        lp -= 0.5 * z * z + ls;
    }
    return lp - 0.5 * static_cast<double>(kFingers) * kLog2Pi;
}

Trajectory rollout(GraspEnv& env, const Observation& first, const Policy& policy, const ValueFunction& value,
                   const PpoConfig& cfg, util::Rng& rng, bool deterministic) {
    Trajectory traj;
    Observation obs = first;
    for (;;) {
        Step s;
        s.observation = obs.to_array();
        const auto mean = policy.mean.evaluate(s.observation);
        for (std::size_t j = 0; j < kFingers; ++j)
            s.u[j] = deterministic ? mean[j]
                                   : mean[j] + std::exp(policy.log_std.data()[j]) * util::standard_normal(rng);
        s.log_prob = log_prob(policy, s.observation, s.u);
        s.value = value.net.evaluate(s.observation)[0];
        std::array<double, kFingers> action{};
        for (std::size_t j = 0; j < kFingers; ++j) action[j] = cfg.action_scale * std::tanh(s.u[j]);
        const StepResult r = env_step(env, action);
        s.reward = r.reward;
        traj.steps.push_back(s);
        if (r.done) {
            traj.terminal = true;
            traj.success = r.success;
            return traj;
        }
        obs = r.observation;
    }
}

std::vector<double> gae_advantages(const Trajectory& traj, double gamma, double lambda) {
    const std::size_t n = traj.steps.size();
    if (n == 0) throw DomainError("gae_advantages: empty trajectory");
    std::vector<double> adv(n);
    double next_value = traj.terminal ? 0.0 : traj.bootstrap_value;
    double running = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const auto& s = traj.steps[i];
        const double delta = s.reward + gamma * next_value - s.value;
        running = delta + gamma * lambda * running;
        adv[i] = running;
        next_value = s.value;
    }
    return adv;
}

void normalize_advantages(std::span<double> adv) {
    if (adv.empty()) return;
    const double n = static_cast<double>(adv.size());
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : adv) a = sd > 1e-12 ? (a - mean) / sd : a - mean;
}

Tensor clipped_surrogate(const Tensor& ratio, const Tensor& advantage, double eps) {
    return ad::minimum(ad::mul(ratio, advantage), ad::mul(ad::clamp(ratio, 1.0 - eps, 1.0 + eps), advantage));
}

PpoBatch make_batch(const std::vector<Trajectory>& trajs, const PpoConfig& cfg) {
    PpoBatch b;
    for (const auto& t : trajs) {
        const auto adv = gae_advantages(t, cfg.gamma, cfg.gae_lambda);
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            b.steps.push_back(t.steps[i]);
            b.advantages.push_back(adv[i]);
            b.returns.push_back(adv[i] + t.steps[i].value);
        }
    }
    normalize_advantages(b.advantages);
    return b;
}

Tensor surrogate_loss(const Policy& policy, const PpoBatch& batch, std::span<const std::size_t> rows, double eps) {
    const Tensor obs = rows_tensor(kObservationSize, batch, rows, false);
    const Tensor u = rows_tensor(kFingers, batch, rows, true);
    const Tensor old_lp = column(rows, [&](std::size_t r) { return batch.steps[r].log_prob; });
    const Tensor adv = column(rows, [&](std::size_t r) { return batch.advantages[r]; });
    const Tensor lp = gaussian_log_prob(policy.mean.forward(obs), policy.log_std, u);
    const Tensor ratio = ad::exp(ad::sub(lp, old_lp));
    return ad::neg(ad::mean(clipped_surrogate(ratio, adv, eps)));
}

PpoLosses ppo_update(Policy& policy, ValueFunction& value, ad::Adam& opt, const PpoBatch& batch,
                     const PpoConfig& cfg, util::Rng& rng) {
    const std::size_t n = batch.steps.size();
    if (n == 0) throw DomainError("ppo_update: empty batch");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    PpoLosses last;
    const double entropy_const = 0.5 * static_cast<double>(kFingers) * (1.0 + kLog2Pi);
    for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[util::uniform_index(rng, i)]);
        for (std::size_t b = 0; b < n; b += cfg.minibatch) {
            const std::span<const std::size_t> rows(order.data() + b, std::min(cfg.minibatch, n - b));
            const Tensor pol = surrogate_loss(policy, batch, rows, cfg.clip);
            const Tensor obs = rows_tensor(kObservationSize, batch, rows, false);
            const Tensor ret = column(rows, [&](std::size_t r) { return batch.returns[r]; });
            const Tensor v = ad::reshape(value.net.forward(obs), {rows.size()});
            const Tensor val = ad::mse_loss(v, ret);
            const Tensor ent = ad::add_scalar(ad::sum(policy.log_std), entropy_const);
            const Tensor total =
                ad::sub(ad::add(pol, ad::scale(val, cfg.value_coef)), ad::scale(ent, cfg.entropy_coef));
            last = {pol.item(), val.item(), ent.item()};
            if (!std::isfinite(total.item())) throw DomainError("ppo_update: non-finite loss");
            opt.zero_grad();
            ad::backward(total);
            opt.step();
        }
    }
    return last;
}

}  // namespace voxforge::grasp
