#pragma once

// Private JSON (de)serialization of architecture layers, shared between the
// checkpoint writer and the experiment spec parser. Not installed.

#include "json.hpp"
#include "nctmc/nn/network.hpp"

namespace nctmc::nn {

nlohmann::json layer_to_json(const Layer& layer);
Layer layer_from_json(const nlohmann::json& j);

}  // namespace nctmc::nn
