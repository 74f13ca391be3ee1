/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/camera/rotation.hpp
 *
 * Copyright 2026 The mfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef MFIT_CAMERA_ROTATION_HPP
#define MFIT_CAMERA_ROTATION_HPP

#include "Eigen/Core"

#include <cmath>
#include <numbers>

namespace mfit {
namespace camera {

/**
 * Head rotation angles in radians. The rotation is R = Rz(roll) * Ry(yaw) * Rx(pitch).
 * The camera looks down -z, so with yaw > 0 the face turns towards +x and its
 * right silhouette (landmarks 11-17) moves out of view.
 */
struct EulerAngles
{
    double pitch = 0.0;
    double yaw = 0.0;
    double roll = 0.0;
};

/// Wraps \p angle into (-pi, pi].
inline double normalize_angle(double angle)
{
    double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
    if (wrapped <= -std::numbers::pi)
        wrapped += 2.0 * std::numbers::pi;
    return wrapped;
}

inline Eigen::Matrix3d rotation_from_euler(double pitch, double yaw, double roll)
{
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const double cr = std::cos(roll), sr = std::sin(roll);
    Eigen::Matrix3d rx, ry, rz;
    rx << 1, 0, 0, 0, cp, -sp, 0, sp, cp;
    ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
    rz << cr, -sr, 0, sr, cr, 0, 0, 0, 1;
    return rz * ry * rx;
}

inline Eigen::Matrix3d rotation_from_euler(const EulerAngles& angles)
{
    return rotation_from_euler(angles.pitch, angles.yaw, angles.roll);
}

/**
 * Inverse of rotation_from_euler. Yaw is returned in [-pi/2, pi/2]; at gimbal
 * lock (|yaw| = pi/2) roll is set to zero and pitch absorbs the remaining
 * rotation about the viewing axis.
 */
inline EulerAngles euler_from_rotation(const Eigen::Matrix3d& r)
{
    EulerAngles angles;
    const double cos_yaw = std::hypot(r(0, 0), r(1, 0));
    angles.yaw = std::atan2(-r(2, 0), cos_yaw);
    if (cos_yaw > 1e-12)
    {
        angles.pitch = std::atan2(r(2, 1), r(2, 2));
        angles.roll = std::atan2(r(1, 0), r(0, 0));
    } else
    {
        angles.pitch = std::atan2(-r(1, 2), r(1, 1));
        angles.roll = 0.0;
    }
    angles.pitch = normalize_angle(angles.pitch);
    angles.yaw = normalize_angle(angles.yaw);
    angles.roll = normalize_angle(angles.roll);
    return angles;
}

} /* namespace camera */
} /* namespace mfit */

#endif /* MFIT_CAMERA_ROTATION_HPP */
