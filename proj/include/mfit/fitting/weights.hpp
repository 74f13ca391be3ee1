/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/fitting/weights.hpp
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

#ifndef MFIT_FITTING_WEIGHTS_HPP
#define MFIT_FITTING_WEIGHTS_HPP

#include "mfit/camera/pose_estimation.hpp"
#include "mfit/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mfit {
namespace fitting {

/**
 * Fitting configuration. epsilon is the large-pose boundary on 2|yaw|/pi
 * (0.5 means 45 degrees) and w damps the weaker of the two terms.
 */
struct WeightConfig
{
    double epsilon = 0.5;
    double w = 0.5;
    double lambda_alpha = 1e-3;
    double lambda_beta = 1e-3;
    int iters = 4;

    // Inner damped Gauss-Newton solve of each round.
    int max_inner_steps = 50;
    double relative_tolerance = 1e-8;
    double visibility_threshold = camera::default_visibility_threshold;
    /// Refine scale, rotation and translation together with the coefficients in
    /// each round. When false the closed-form pose of the round is kept fixed.
    bool joint_pose = true;
};

inline void validate(const WeightConfig& cfg)
{
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0))
        throw InvalidInput("epsilon must lie in (0, 1], got " + std::to_string(cfg.epsilon));
    if (!(cfg.w > 0.0 && cfg.w <= 1.0))
        throw InvalidInput("w must lie in (0, 1], got " + std::to_string(cfg.w));
    if (cfg.iters < 1)
        throw InvalidInput("iters must be at least 1");
    if (!(cfg.lambda_alpha >= 0.0) || !(cfg.lambda_beta >= 0.0))
        throw InvalidInput("prior weights must be non-negative");
    if (cfg.max_inner_steps < 1 || !(cfg.relative_tolerance > 0.0))
        throw InvalidInput("invalid inner solver settings");
    if (!(cfg.visibility_threshold >= 0.0))
        throw InvalidInput("visibility threshold must be non-negative");
}

struct Weights
{
    double lambda_2d = 1.0;
    double lambda_3d = 0.0;
};

/**
 * Pose-adaptive balance of the 2D and 3D landmark terms.
 *
 * With r = 2|yaw|/pi: for r >= epsilon (large pose) lambda_3d = r and
 * lambda_2d = (1 - r) * w; otherwise lambda_3d = r * w and lambda_2d = 1 - r.
 * r is clamped to 1 so both weights stay in [0, 1] past a full profile.
 */
inline Weights adaptive_weights(double yaw, const WeightConfig& cfg = {})
{
    if (!std::isfinite(yaw))
        throw InvalidInput("yaw must be finite");
    const double r = std::min(2.0 * std::abs(yaw) / std::numbers::pi, 1.0);
    if (r >= cfg.epsilon)
        return {(1.0 - r) * cfg.w, r};
    return {1.0 - r, r * cfg.w};
}

} /* namespace fitting */
} /* namespace mfit */

#endif /* MFIT_FITTING_WEIGHTS_HPP */
