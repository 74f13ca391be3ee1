/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/evaluation/icp.hpp
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

#ifndef MFIT_EVALUATION_ICP_HPP
#define MFIT_EVALUATION_ICP_HPP

#include "mfit/core/types.hpp"
#include "mfit/evaluation/kdtree.hpp"

#include "Eigen/Core"
#include "Eigen/Eigenvalues"
#include "Eigen/SVD"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace mfit {
namespace evaluation {

/// Rigid transform that maps source points onto the target: p -> rotation * p + translation.
struct AlignmentResult
{
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    double rms = 0.0; ///< mm, RMS nearest-neighbour distance after alignment
    int iterations = 0;
    std::vector<double> rms_history; ///< before the first step, then after each step

    Eigen::Matrix3Xd apply(const Eigen::Matrix3Xd& points) const
    {
        return (rotation * points).colwise() + translation;
    }
};

/// Least-squares rigid transform between paired point sets (Kabsch / Umeyama without scale).
inline std::pair<Eigen::Matrix3d, Eigen::Vector3d> rigid_fit(const Eigen::Matrix3Xd& from, const Eigen::Matrix3Xd& to)
{
    const Eigen::Vector3d from_centroid = from.rowwise().mean();
    const Eigen::Vector3d to_centroid = to.rowwise().mean();
    const Eigen::Matrix3d covariance =
        (to.colwise() - to_centroid) * (from.colwise() - from_centroid).transpose();
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(covariance, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d correction = Eigen::Matrix3d::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
        correction(2, 2) = -1.0;
    const Eigen::Matrix3d rotation = svd.matrixU() * correction * svd.matrixV().transpose();
    return {rotation, to_centroid - rotation * from_centroid};
}

namespace detail {

inline void require_full_rank(const Eigen::Matrix3Xd& points, const char* name)
{
    if (points.cols() == 0)
        throw InvalidInput(std::string("ICP ") + name + " cloud is empty");
    if (!points.allFinite())
        throw InvalidInput(std::string("ICP ") + name + " cloud has non-finite coordinates");
    const Eigen::Matrix3Xd centred = points.colwise() - points.rowwise().mean();
    const Eigen::Vector3d spread = Eigen::JacobiSVD<Eigen::Matrix3Xd>(centred).singularValues();
    if (!(spread(0) > 0.0) || spread(2) / spread(0) < 1e-9)
        throw DegenerateConfiguration(std::string("ICP ") + name + " cloud is degenerate (rank < 3)");
}

inline double rms_to(const KdTree& tree, const Eigen::Matrix3Xd& points, Eigen::Matrix3Xd* matches)
{
    double sum = 0.0;
    for (Eigen::Index i = 0; i < points.cols(); ++i)
    {
        const auto neighbor = tree.nearest(points.col(i));
        sum += neighbor.squared_distance;
        if (matches)
            matches->col(i) = tree.points().col(neighbor.index);
    }
    return std::sqrt(sum / static_cast<double>(points.cols()));
}

using RigidTransform = std::pair<Eigen::Matrix3d, Eigen::Vector3d>;

/// Identity, centroid shift, and principal axes matched under the four proper sign choices.
inline std::vector<RigidTransform> initial_transforms(const Eigen::Matrix3Xd& source, const Eigen::Matrix3Xd& target)
{
    const Eigen::Vector3d source_centroid = source.rowwise().mean();
    const Eigen::Vector3d target_centroid = target.rowwise().mean();
    std::vector<RigidTransform> out{{Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()},
                                    {Eigen::Matrix3d::Identity(), target_centroid - source_centroid}};

    const auto axes = [](const Eigen::Matrix3Xd& points, const Eigen::Vector3d& centroid) {
        const Eigen::Matrix3Xd centred = points.colwise() - centroid;
        const Eigen::Matrix3d scatter = centred * centred.transpose();
        return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(scatter).eigenvectors();
    };
    const Eigen::Matrix3d source_axes = axes(source, source_centroid);
    const Eigen::Matrix3d target_axes = axes(target, target_centroid);
    for (const double a : {1.0, -1.0})
    {
        for (const double b : {1.0, -1.0})
        {
            Eigen::Matrix3d rotation = target_axes * Eigen::Vector3d(a, b, 1.0).asDiagonal() * source_axes.transpose();
            if (rotation.determinant() < 0.0)
                rotation = target_axes * Eigen::Vector3d(a, b, -1.0).asDiagonal() * source_axes.transpose();
            out.emplace_back(rotation, target_centroid - rotation * source_centroid);
        }
    }
    return out;
}

} /* namespace detail */

/**
 * Point-to-point ICP of \p source onto \p target.
 *
 * The start is whichever of the identity, a centroid shift, or a principal-axes
 * match has the lowest RMS; the identity wins ties, so nearly aligned inputs
 * start where they are. Each step then matches every transformed source point
 * to its nearest target vertex and re-solves the rigid transform in closed
 * form. The RMS residual is non-increasing; iteration stops after max_iters
 * steps, when it decreases by less than tol, or at an exact fixed point.
 */
inline AlignmentResult icp_align(const Eigen::Matrix3Xd& source, const Eigen::Matrix3Xd& target, int max_iters = 50,
                                 double tol = 1e-10)
{
    detail::require_full_rank(source, "source");
    detail::require_full_rank(target, "target");
    if (max_iters < 0 || !(tol >= 0.0))
        throw InvalidInput("ICP needs max_iters >= 0 and tol >= 0");

    const KdTree tree(target);
    AlignmentResult result;
    Eigen::Matrix3Xd matches(3, source.cols());
    result.rms = std::numeric_limits<double>::infinity();
    for (const auto& [rotation, translation] : detail::initial_transforms(source, target))
    {
        Eigen::Matrix3Xd candidate_matches(3, source.cols());
        const double rms = detail::rms_to(tree, (rotation * source).colwise() + translation, &candidate_matches);
        if (rms < result.rms)
        {
            result.rotation = rotation;
            result.translation = translation;
            result.rms = rms;
            matches = std::move(candidate_matches);
        }
    }
    result.rms_history.push_back(result.rms);

    while (result.iterations < max_iters)
    {
        const auto [rotation, translation] = rigid_fit(source, matches);
        Eigen::Matrix3Xd next_matches(3, source.cols());
        const Eigen::Matrix3Xd moved = (rotation * source).colwise() + translation;
        const double rms = detail::rms_to(tree, moved, &next_matches);
        ++result.iterations;
        if (rms > result.rms)
        {
            // Only reachable through rounding at a fixed point; keep the better transform.
            result.rms_history.push_back(result.rms);
            break;
        }
        const double improvement = result.rms - rms;
        result.rotation = rotation;
        result.translation = translation;
        result.rms = rms;
        result.rms_history.push_back(rms);
        matches = std::move(next_matches);
        if (improvement < tol || improvement == 0.0)
            break;
    }
    return result;
}

} /* namespace evaluation */
} /* namespace mfit */

#endif /* MFIT_EVALUATION_ICP_HPP */
