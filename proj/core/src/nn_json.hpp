#pragma once

// Internal serialization helpers; not installed. Kept out of public headers so
// the vendored json library stays a private dependency of the core library.

#include <json.hpp>

#include "tidp/nn/layers.hpp"

namespace tidp::nn {

nlohmann::json dense_to_json(const Dense& layer);
Dense dense_from_json(const nlohmann::json& j);

nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

nlohmann::json lstm_to_json(const Lstm& cell);
Lstm lstm_from_json(const nlohmann::json& j);

}  // namespace tidp::nn
