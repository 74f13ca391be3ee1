/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/camera/pose.hpp
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

#ifndef MFIT_CAMERA_POSE_HPP
#define MFIT_CAMERA_POSE_HPP

#include "mfit/camera/rotation.hpp"
#include "mfit/core/types.hpp"

#include "Eigen/Core"

#include <cmath>
#include <string>

namespace mfit {
namespace camera {

/**
 * Weak-perspective camera pose.
 *
 * An image point is scale * [R p]_xy + translation. The depth offset is the
 * auxiliary 3-vector that moves detected 3D landmarks into the camera frame of
 * the model, i.e. scale * R * p is compared against L_3d + depth_offset.
 */
struct Pose
{
    double scale = 1.0; ///< pixels per mm
    EulerAngles angles;
    Eigen::Vector2d translation = Eigen::Vector2d::Zero();  ///< pixels
    Eigen::Vector3d depth_offset = Eigen::Vector3d::Zero(); ///< pixels

    Eigen::Matrix3d rotation() const { return rotation_from_euler(angles); }
    double yaw() const { return angles.yaw; }
};

inline void validate(const Pose& pose)
{
    if (!std::isfinite(pose.scale) || pose.scale <= 0.0)
        throw InvalidInput("pose scale must be positive and finite, got " + std::to_string(pose.scale));
    if (!std::isfinite(pose.angles.pitch) || !std::isfinite(pose.angles.yaw) || !std::isfinite(pose.angles.roll) ||
        !pose.translation.allFinite() || !pose.depth_offset.allFinite())
        throw InvalidInput("pose has non-finite entries");
}

inline Eigen::Vector2d project(const Pose& pose, const Eigen::Vector3d& point)
{
    return pose.scale * (pose.rotation() * point).head<2>() + pose.translation;
}

inline Eigen::Matrix2Xd project(const Pose& pose, const Eigen::Matrix3Xd& points)
{
    const Eigen::Matrix3Xd rotated = pose.scale * pose.rotation() * points;
    return rotated.topRows<2>().colwise() + pose.translation;
}

/// scale * R * points, the camera-frame positions before the orthographic drop.
inline Eigen::Matrix3Xd to_camera_frame(const Pose& pose, const Eigen::Matrix3Xd& points)
{
    return pose.scale * pose.rotation() * points;
}

/**
 * Detected landmarks of one image. Both sets use the semantic 68-point order.
 * points_3d holds image x, y in pixels plus a relative depth, also in pixels.
 */
struct LandmarkSet
{
    Eigen::Matrix2Xd points_2d = Eigen::Matrix2Xd::Zero(2, num_landmarks);
    Eigen::Matrix3Xd points_3d = Eigen::Matrix3Xd::Zero(3, num_landmarks);
    double image_width = 0.0;
    double image_height = 0.0;
};

inline void validate(const LandmarkSet& landmarks)
{
    if (landmarks.points_2d.cols() != num_landmarks || landmarks.points_3d.cols() != num_landmarks)
        throw InvalidInput("landmark set must hold exactly " + std::to_string(num_landmarks) + " 2D and 3D points");
    for (int i = 0; i < num_landmarks; ++i)
    {
        if (!landmarks.points_2d.col(i).allFinite() || !landmarks.points_3d.col(i).allFinite())
            throw InvalidInput("landmark " + std::to_string(i + 1) + " has a non-finite coordinate");
    }
}

} /* namespace camera */
} /* namespace mfit */

#endif /* MFIT_CAMERA_POSE_HPP */
