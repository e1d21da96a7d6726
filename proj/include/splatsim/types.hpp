#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace splatsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Unit quaternion for a rotation of angle_rad about axis (normalized here).
inline Quat quat_from_axis_angle(const Vec3& axis, double angle_rad) {
    return Quat(Eigen::AngleAxisd(angle_rad, axis.normalized()));
}

} // namespace splatsim
