// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "voxforge/rgan/model.hpp"

namespace voxforge::rgan {

nlohmann::json config_to_json(const RganConfig& cfg);
// Missing keys keep their defaults; unknown keys or wrong types throw
// DomainError. The result is validated.
RganConfig config_from_json(const nlohmann::json& j);

}  // namespace voxforge::rgan
