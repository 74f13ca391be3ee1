/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/fitting/fit.hpp
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

#ifndef MFIT_FITTING_FIT_HPP
#define MFIT_FITTING_FIT_HPP

#include "mfit/camera/pose.hpp"
#include "mfit/camera/pose_estimation.hpp"
#include "mfit/core/landmark_layout.hpp"
#include "mfit/core/types.hpp"
#include "mfit/fitting/energy.hpp"
#include "mfit/fitting/gauss_newton.hpp"
#include "mfit/fitting/weights.hpp"
#include "mfit/model/model_basis.hpp"

#include "Eigen/Core"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfit {
namespace fitting {

/**
 * Ablation variants of the fitting pipeline.
 *
 * two_d: 2D term only. three_d: 3D term only. joint: both terms at a fixed
 * 0.5/0.5. joint_weighted: both terms with pose-adaptive weights. full: as
 * joint_weighted plus occlusion-aware pose refinement, where hidden 2D
 * silhouette landmarks are replaced by the detected 3D ones.
 */
enum class Variant { two_d, three_d, joint, joint_weighted, full };

inline constexpr std::array<Variant, 5> all_variants{Variant::two_d, Variant::three_d, Variant::joint,
                                                     Variant::joint_weighted, Variant::full};

inline const char* to_string(Variant variant)
{
    switch (variant)
    {
    case Variant::two_d:
        return "2D";
    case Variant::three_d:
        return "3D";
    case Variant::joint:
        return "2D+3D";
    case Variant::joint_weighted:
        return "2D+3D+W";
    case Variant::full:
        return "2D+3D+P+W";
    }
    return "?";
}

/// Accepts the table labels ("2D", ..., "2D+3D+P+W") and "full".
inline std::optional<Variant> parse_variant(std::string_view name)
{
    if (name == "full")
        return Variant::full;
    for (Variant v : all_variants)
    {
        if (name == to_string(v))
            return v;
    }
    return std::nullopt;
}

struct IterationRecord
{
    double yaw = 0.0; ///< closed-form yaw of the round, the one that sets the weights
    double lambda_2d = 0.0;
    double lambda_3d = 0.0;
    double e_2d = 0.0;
    double e_3d = 0.0;
    double e_prior = 0.0;
    double e_fit = 0.0;
    layout::Side hidden = layout::Side::none;
    int inner_steps = 0;
    bool inner_converged = false;
    std::vector<double> inner_energies; ///< E_fit before the round and after each accepted step
};

struct FitReport
{
    Variant variant = Variant::full;
    model::FaceParams params;
    camera::Pose pose;
    camera::Pose coarse_pose;
    camera::Pose initial_pose; ///< refined pose for the full variant, the coarse pose otherwise
    std::vector<IterationRecord> per_iteration;
    bool converged = false;
    std::vector<double> residuals_2d; ///< per landmark, against the 2D targets of the last round
    std::vector<double> residuals_3d; ///< per landmark, against L_3d + depth_offset

    int total_inner_steps() const
    {
        int total = 0;
        for (const auto& it : per_iteration)
            total += it.inner_steps;
        return total;
    }
};

namespace detail {

inline Weights variant_weights(Variant variant, double yaw, const WeightConfig& cfg)
{
    switch (variant)
    {
    case Variant::two_d:
        return {1.0, 0.0};
    case Variant::three_d:
        return {0.0, 1.0};
    case Variant::joint:
        return {0.5, 0.5};
    case Variant::joint_weighted:
    case Variant::full:
        break;
    }
    return adaptive_weights(yaw, cfg);
}

} /* namespace detail */

/**
 * Runs one ablation variant of the joint 2D/3D fit.
 *
 * Starting from the mean face, the pose is estimated coarse-to-fine (the
 * refinement only for the full variant). Each of cfg.iters rounds then
 * re-solves scale, rotation and translation in closed form against the
 * current landmarks, picks the 2D/3D weights, and minimises the joint energy
 * with damped Gauss-Newton over (alpha, beta, depth_offset) and, unless
 * cfg.joint_pose is off, scale, rotation and translation as well.
 *
 * @param[in] basis The morphable model.
 * @param[in] landmarks Detected 2D and 3D landmarks.
 * @param[in] cfg Weights, priors and solver settings.
 * @param[in] variant Which terms and pose steps to enable.
 * @return The fit with per-round diagnostics. converged is false if any inner
 *         solve failed to reach its tolerance; parameters are then the best found.
 */
inline FitReport fit_variant(const model::ModelBasis& basis, const camera::LandmarkSet& landmarks,
                             const WeightConfig& cfg, Variant variant)
{
    validate(cfg);
    model::validate(basis);
    camera::validate(landmarks);
    const bool refine = variant == Variant::full;

    FitReport report;
    report.variant = variant;
    report.coarse_pose = camera::coarse_pose(basis, landmarks);
    report.initial_pose = refine ? camera::refine_pose(basis, landmarks, report.coarse_pose, cfg.visibility_threshold)
                                 : report.coarse_pose;

    const model::LandmarkBasis landmark_basis(basis);
    model::FaceParams params = model::FaceParams::zero(basis);
    camera::Pose pose = report.initial_pose;
    report.converged = true;

    GaussNewtonOptions options;
    options.max_steps = cfg.max_inner_steps;
    options.relative_tolerance = cfg.relative_tolerance;

    Eigen::Matrix2Xd targets = landmarks.points_2d;
    for (int round = 0; round < cfg.iters; ++round)
    {
        IterationRecord record;
        const Eigen::Matrix3Xd current = landmark_basis.points(params);
        record.hidden = refine ? camera::hidden_silhouette(pose.yaw(), cfg.visibility_threshold) : layout::Side::none;
        targets = camera::hybrid_targets(landmarks, record.hidden);

        const Eigen::Vector3d depth_offset = pose.depth_offset;
        pose = camera::solve_pose_weak_perspective(current, targets);
        pose.depth_offset = depth_offset;

        record.yaw = pose.yaw();
        const Weights weights = detail::variant_weights(variant, record.yaw, cfg);
        const JointResidual problem(landmark_basis, basis.shape_eigenvalues, basis.expr_eigenvalues, pose, targets,
                                    landmarks.points_3d, weights, cfg, cfg.joint_pose);
        const GaussNewtonSummary summary = minimize_gauss_newton(problem, problem.pack(params, pose), options);
        params = problem.unpack_params(summary.x);
        pose = problem.unpack_pose(summary.x);
        pose.angles = {camera::normalize_angle(pose.angles.pitch), camera::normalize_angle(pose.angles.yaw),
                       camera::normalize_angle(pose.angles.roll)};

        const EnergyTerms terms = problem.energies(summary.x);
        record.lambda_2d = weights.lambda_2d;
        record.lambda_3d = weights.lambda_3d;
        record.e_2d = terms.e_2d;
        record.e_3d = terms.e_3d;
        record.e_prior = terms.e_prior;
        record.e_fit = terms.e_fit;
        record.inner_steps = summary.steps;
        record.inner_converged = summary.converged;
        record.inner_energies = summary.energies;
        report.converged = report.converged && summary.converged;
        report.per_iteration.push_back(std::move(record));
    }

    report.params = params;
    report.pose = pose;
    const Eigen::Matrix3Xd final_landmarks = landmark_basis.points(params);
    const Eigen::Matrix2Xd projected = camera::project(pose, final_landmarks);
    const Eigen::Matrix3Xd in_camera = camera::to_camera_frame(pose, final_landmarks);
    for (int i = 0; i < num_landmarks; ++i)
    {
        report.residuals_2d.push_back((projected.col(i) - targets.col(i)).norm());
        report.residuals_3d.push_back((in_camera.col(i) - landmarks.points_3d.col(i) - pose.depth_offset).norm());
    }
    return report;
}

/// The complete pipeline: coarse-to-fine pose, adaptive weights and joint 2D/3D fitting.
inline FitReport fit(const model::ModelBasis& basis, const camera::LandmarkSet& landmarks, const WeightConfig& cfg = {})
{
    return fit_variant(basis, landmarks, cfg, Variant::full);
}

} /* namespace fitting */
} /* namespace mfit */

#endif /* MFIT_FITTING_FIT_HPP */
