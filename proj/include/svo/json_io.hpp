#pragma once

#include <json.hpp>

#include "svo/geometry.hpp"
#include "svo/propagation.hpp"

namespace svo {

// JSON schemas: a polytope is {vertices: [[..]], halfspaces: [{normal,
// offset}]}; a front adds boundary points with cone angular intervals, the
// time index and the measurement history.

nlohmann::ordered_json polytope_to_json(const Polytope& P);
Polytope polytope_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json cone_to_json(const SupportCone& c);
SupportCone cone_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json front_to_json(const Front& f);
Front front_from_json(const nlohmann::ordered_json& j);

}  // namespace svo
