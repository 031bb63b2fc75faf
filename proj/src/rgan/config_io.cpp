// SPDX-License-Identifier: Apache-2.0

#include "voxforge/rgan/config_io.hpp"

#include <set>
#include <string>

#include "voxforge/error.hpp"

namespace voxforge::rgan {

nlohmann::json config_to_json(const RganConfig& c) {
    return {{"grid_dim", c.grid_dim},
            {"encoder_channels", c.encoder_channels},
            {"latent", c.latent},
            {"lstm_hidden", c.lstm_hidden},
            {"decoder_channels", c.decoder_channels},
            {"disc_channels", c.disc_channels},
            {"lambda_adv", c.lambda_adv},
            {"lr", c.lr},
            {"batch", c.batch},
            {"epochs", c.epochs},
            {"seed", c.seed},
            {"min_views", c.min_views},
            {"max_views", c.max_views}};
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into) {
    if (!j.contains(key)) return;
    try {
        into = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("rgan config key '") + key + "': " + e.what());
    }
}

}  // namespace

RganConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("rgan config must be a JSON object");
    static const std::set<std::string> known = {"grid_dim", "encoder_channels", "latent",  "lstm_hidden", "decoder_channels",
                                                "disc_channels", "lambda_adv",   "lr",      "batch",       "epochs",
                                                "seed",          "min_views",    "max_views"};
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) throw DomainError("unknown rgan config key '" + key + "'");
    RganConfig c;
    read(j, "grid_dim", c.grid_dim);
    read(j, "encoder_channels", c.encoder_channels);
    read(j, "latent", c.latent);
    read(j, "lstm_hidden", c.lstm_hidden);
    read(j, "decoder_channels", c.decoder_channels);
    read(j, "disc_channels", c.disc_channels);
    read(j, "lambda_adv", c.lambda_adv);
    read(j, "lr", c.lr);
    read(j, "batch", c.batch);
    read(j, "epochs", c.epochs);
    read(j, "seed", c.seed);
    read(j, "min_views", c.min_views);
    read(j, "max_views", c.max_views);
    c.validate();
    return c;
}

}  // namespace voxforge::rgan
