// SPDX-License-Identifier: MIT

#include "sixdof/serialization.h"

#include "sixdof/error.h"

namespace sixdof {

nlohmann::json pose_to_json(const Pose& pose) {
  const Mat4 m = pose.matrix();
  nlohmann::json arr = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) arr.push_back(m(r, c));
  }
  return arr;
}

Pose pose_from_json(const nlohmann::json& j, double tolerance) {
  if (!j.is_array() || j.size() != 16) {
    throw Error(ErrorCode::kParseError, "pose must be an array of 16 numbers");
  }
  Mat4 m;
  for (int i = 0; i < 16; ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::kParseError, "pose entries must be numbers");
    m(i / 4, i % 4) = j[i].get<double>();
  }
  try {
    return Pose::from_matrix(m, tolerance);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

nlohmann::json intrinsics_to_json(const Intrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx},
          {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

Intrinsics intrinsics_from_json(const nlohmann::json& j) {
  try {
    Intrinsics k{j.at("fx").get<double>(), j.at("fy").get<double>(),
                 j.at("cx").get<double>(), j.at("cy").get<double>(),
                 j.at("width").get<int>(),   j.at("height").get<int>()};
    k.validate();
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("intrinsics: ") + e.what());
  }
}

nlohmann::json vec3_to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kParseError, "expected a 3-vector");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace sixdof
