#pragma once

#include <string>

#include <json.hpp>

#include "corelr/geometry.hpp"

namespace corelr {

using Json = nlohmann::ordered_json;

/// Two-space indented JSON with shortest round-trip numbers; non-finite
/// numbers become null. Ends with a newline.
std::string dump_json(const Json& j);

inline Json vec_json(Vec3 v) { return Json::array({v.x, v.y, v.z}); }

}  // namespace corelr
