/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/evaluation/metrics.hpp
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

#ifndef MFIT_EVALUATION_METRICS_HPP
#define MFIT_EVALUATION_METRICS_HPP

#include "mfit/core/types.hpp"
#include "mfit/evaluation/icp.hpp"
#include "mfit/evaluation/kdtree.hpp"

#include "Eigen/Core"

#include <cmath>
#include <string>
#include <vector>

namespace mfit {
namespace evaluation {

inline constexpr double default_crop_radius_mm = 85.0;

struct CroppedVertices
{
    std::vector<int> indices; ///< original vertex indices, ascending
    Eigen::Matrix3Xd points;
};

/// Vertices inside the closed ball of \p radius around the nose tip vertex.
inline CroppedVertices crop_face(const Eigen::Matrix3Xd& vertices, int nose_tip_index,
                                 double radius = default_crop_radius_mm)
{
    if (nose_tip_index < 0 || nose_tip_index >= vertices.cols())
        throw InvalidInput("nose tip index " + std::to_string(nose_tip_index) + " out of range");
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw InvalidInput("crop radius must be finite and non-negative");
    const Eigen::Vector3d center = vertices.col(nose_tip_index);
    const double radius_sq = radius * radius;
    CroppedVertices crop;
    for (Eigen::Index i = 0; i < vertices.cols(); ++i)
    {
        if ((vertices.col(i) - center).squaredNorm() <= radius_sq)
            crop.indices.push_back(static_cast<int>(i));
    }
    if (crop.indices.empty())
        throw InvalidInput("face crop is empty");
    crop.points.resize(3, static_cast<Eigen::Index>(crop.indices.size()));
    for (std::size_t k = 0; k < crop.indices.size(); ++k)
        crop.points.col(static_cast<Eigen::Index>(k)) = vertices.col(crop.indices[k]);
    return crop;
}

/// Distance from each reconstructed point to its nearest ground-truth vertex.
inline std::vector<double> nearest_vertex_errors(const Eigen::Matrix3Xd& reconstructed, const KdTree& ground_truth)
{
    std::vector<double> errors(static_cast<std::size_t>(reconstructed.cols()));
    for (Eigen::Index i = 0; i < reconstructed.cols(); ++i)
        errors[static_cast<std::size_t>(i)] = std::sqrt(ground_truth.nearest(reconstructed.col(i)).squared_distance);
    return errors;
}

/**
 * Root-mean-square surface error sqrt(sum d_i^2 / N) over the N reconstructed
 * (already aligned and cropped) points, with d_i the distance to the nearest
 * ground-truth vertex.
 */
inline double rmse_3d(const Eigen::Matrix3Xd& reconstructed, const KdTree& ground_truth)
{
    if (reconstructed.cols() == 0)
        throw InvalidInput("rmse_3d needs at least one reconstructed vertex");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < reconstructed.cols(); ++i)
        sum += ground_truth.nearest(reconstructed.col(i)).squared_distance;
    return std::sqrt(sum / static_cast<double>(reconstructed.cols()));
}

inline double rmse_3d(const Eigen::Matrix3Xd& reconstructed, const Eigen::Matrix3Xd& ground_truth)
{
    if (reconstructed.cols() == 0 || ground_truth.cols() == 0)
        throw InvalidInput("rmse_3d needs non-empty inputs");
    return rmse_3d(reconstructed, KdTree(ground_truth));
}

struct SurfaceScore
{
    double rmse_mm = 0.0;
    AlignmentResult alignment;
    std::vector<int> cropped_indices;
    std::vector<double> vertex_errors; ///< per cropped vertex, mm
};

/**
 * Full scoring protocol: rigidly align the reconstruction to the ground truth
 * with ICP, crop the aligned reconstruction around its nose tip and measure
 * the RMS distance to the full ground-truth mesh.
 */
inline SurfaceScore score_reconstruction(const Eigen::Matrix3Xd& reconstructed, const Eigen::Matrix3Xd& ground_truth,
                                         int nose_tip_index, double radius = default_crop_radius_mm,
                                         int icp_iters = 50, double icp_tol = 1e-10)
{
    SurfaceScore score;
    score.alignment = icp_align(reconstructed, ground_truth, icp_iters, icp_tol);
    const CroppedVertices crop = crop_face(score.alignment.apply(reconstructed), nose_tip_index, radius);
    const KdTree tree(ground_truth);
    score.cropped_indices = crop.indices;
    score.vertex_errors = nearest_vertex_errors(crop.points, tree);
    double sum = 0.0;
    for (double e : score.vertex_errors)
        sum += e * e;
    score.rmse_mm = std::sqrt(sum / static_cast<double>(score.vertex_errors.size()));
    return score;
}

} /* namespace evaluation */
} /* namespace mfit */

#endif /* MFIT_EVALUATION_METRICS_HPP */
