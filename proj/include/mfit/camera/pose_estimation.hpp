/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/camera/pose_estimation.hpp
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

#ifndef MFIT_CAMERA_POSE_ESTIMATION_HPP
#define MFIT_CAMERA_POSE_ESTIMATION_HPP

#include "mfit/camera/pose.hpp"
#include "mfit/camera/rotation.hpp"
#include "mfit/core/landmark_layout.hpp"
#include "mfit/core/types.hpp"
#include "mfit/model/model_basis.hpp"

#include "Eigen/Core"
#include "Eigen/Dense"
#include "Eigen/SVD"

#include <cmath>
#include <numbers>
#include <vector>

namespace mfit {
namespace camera {

/// The opposite silhouette is treated as hidden once |yaw| exceeds this.
inline constexpr double default_visibility_threshold = 15.0 * std::numbers::pi / 180.0;

/**
 * Closed-form weak-perspective pose from 3D-2D correspondences.
 *
 * Both point sets are centred, the 2x3 affine map between them is solved by
 * linear least squares, its rows are completed to an orthonormal frame and
 * projected onto SO(3) with an SVD. The scale is the mean of the two singular
 * values of the affine map and the translation follows from the centroids.
 * The result is exact for noiseless input.
 *
 * @param[in] model_points 3D points in model space (mm), one per column.
 * @param[in] image_points Corresponding image points (pixels).
 * @return The pose; depth_offset is left at zero.
 * @throws DegenerateConfiguration if the model points are (near) coplanar or
 *         the image points do not determine a scaled rotation.
 */
inline Pose solve_pose_weak_perspective(const Eigen::Matrix3Xd& model_points, const Eigen::Matrix2Xd& image_points)
{
    const Eigen::Index n = model_points.cols();
    if (image_points.cols() != n)
        throw InvalidInput("pose solver needs as many image points as model points");
    if (n < 4)
        throw DegenerateConfiguration("pose solver needs at least 4 correspondences, got " + std::to_string(n));
    if (!model_points.allFinite() || !image_points.allFinite())
        throw InvalidInput("pose solver input has non-finite coordinates");

    const Eigen::Vector3d model_centroid = model_points.rowwise().mean();
    const Eigen::Vector2d image_centroid = image_points.rowwise().mean();
    const Eigen::Matrix3Xd x = model_points.colwise() - model_centroid;
    const Eigen::Matrix2Xd y = image_points.colwise() - image_centroid;

    const Eigen::JacobiSVD<Eigen::Matrix3Xd> model_svd(x);
    const Eigen::Vector3d spread = model_svd.singularValues();
    if (spread(0) <= 0.0 || spread(2) / spread(0) < 1e-9)
        throw DegenerateConfiguration("model points are coplanar or collinear; pose is undetermined");

    const Eigen::Matrix3d normal = x * x.transpose();
    const Eigen::Matrix<double, 2, 3> affine = normal.ldlt().solve(x * y.transpose()).transpose();

    const Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> affine_svd(affine);
    const Eigen::Vector2d sigma = affine_svd.singularValues();
    if (!(sigma(0) > 0.0) || sigma(1) / sigma(0) < 1e-9)
        throw DegenerateConfiguration("image points do not determine a scaled rotation");

    const Eigen::Vector3d r1 = affine.row(0).transpose().normalized();
    const Eigen::Vector3d r2 = affine.row(1).transpose().normalized();
    Eigen::Matrix3d frame;
    frame.row(0) = r1.transpose();
    frame.row(1) = r2.transpose();
    frame.row(2) = r1.cross(r2).normalized().transpose();
    const Eigen::JacobiSVD<Eigen::Matrix3d> frame_svd(frame, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = frame_svd.matrixU();
    const Eigen::Matrix3d v = frame_svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0)
        u.col(2) *= -1.0;
    const Eigen::Matrix3d rotation = u * v.transpose();

    Pose pose;
    pose.scale = 0.5 * (sigma(0) + sigma(1));
    pose.angles = euler_from_rotation(rotation);
    pose.translation = image_centroid - pose.scale * (pose.rotation() * model_centroid).head<2>();
    return pose;
}

/// Silhouette side that is out of view at \p yaw, or none for near-frontal poses.
inline layout::Side hidden_silhouette(double yaw, double threshold = default_visibility_threshold)
{
    if (std::abs(yaw) <= threshold)
        return layout::Side::none;
    return yaw > 0.0 ? layout::Side::right : layout::Side::left;
}

/**
 * 2D fitting targets where the hidden silhouette entries are replaced by the
 * image-plane position of the corresponding detected 3D landmark.
 */
inline Eigen::Matrix2Xd hybrid_targets(const LandmarkSet& landmarks, layout::Side hidden)
{
    Eigen::Matrix2Xd targets = landmarks.points_2d;
    for (int i = 0; i < num_landmarks; ++i)
    {
        if (layout::is_silhouette(i, hidden))
            targets.col(i) = landmarks.points_3d.col(i).head<2>();
    }
    return targets;
}

namespace detail {

inline Pose solve_subset(const Eigen::Matrix3Xd& model, const Eigen::Matrix2Xd& image, const std::vector<int>& subset)
{
    Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(subset.size()));
    Eigen::Matrix2Xd p(2, static_cast<Eigen::Index>(subset.size()));
    for (std::size_t k = 0; k < subset.size(); ++k)
    {
        m.col(static_cast<Eigen::Index>(k)) = model.col(subset[k]);
        p.col(static_cast<Eigen::Index>(k)) = image.col(subset[k]);
    }
    return solve_pose_weak_perspective(m, p);
}

} /* namespace detail */

/// Centroid alignment of scale * R * model landmarks with the detected 3D landmarks.
inline Eigen::Vector3d initial_depth_offset(const Pose& pose, const Eigen::Matrix3Xd& model_landmarks,
                                            const LandmarkSet& landmarks)
{
    return to_camera_frame(pose, model_landmarks).rowwise().mean() - landmarks.points_3d.rowwise().mean();
}

struct CoarsePoseCandidates
{
    Pose left;  ///< from silhouette 1-9 plus the inner landmarks
    Pose right; ///< from silhouette 11-17 plus the inner landmarks
};

inline CoarsePoseCandidates coarse_pose_candidates(const model::ModelBasis& basis, const LandmarkSet& landmarks)
{
    validate(landmarks);
    const Eigen::Matrix3Xd mean_landmarks = model::landmarks_of(basis, model::FaceParams::zero(basis));
    return {detail::solve_subset(mean_landmarks, landmarks.points_2d, layout::side_with_inner(layout::Side::left)),
            detail::solve_subset(mean_landmarks, landmarks.points_2d, layout::side_with_inner(layout::Side::right))};
}

/// The candidate with the larger |yaw|; on a tie the right one.
inline const Pose& select_candidate(const CoarsePoseCandidates& candidates)
{
    return std::abs(candidates.left.yaw()) > std::abs(candidates.right.yaw()) ? candidates.left : candidates.right;
}

/**
 * Coarse pose of the mean face: solves once with the left silhouette and once
 * with the right silhouette (each together with the 51 inner landmarks) and
 * keeps the candidate with the larger |yaw|. Ties go to the right candidate.
 */
inline Pose coarse_pose(const model::ModelBasis& basis, const LandmarkSet& landmarks)
{
    const CoarsePoseCandidates candidates = coarse_pose_candidates(basis, landmarks);
    Pose pose = select_candidate(candidates);
    pose.depth_offset = initial_depth_offset(pose, model::landmarks_of(basis, model::FaceParams::zero(basis)),
                                             landmarks);
    return pose;
}

/**
 * Pose from all 68 landmarks, with the silhouette hidden at \p reference_yaw
 * replaced by the detected 3D landmark positions. depth_offset is left at zero.
 */
inline Pose solve_pose_hybrid(const Eigen::Matrix3Xd& model_landmarks, const LandmarkSet& landmarks,
                              double reference_yaw, double threshold = default_visibility_threshold)
{
    return solve_pose_weak_perspective(model_landmarks,
                                       hybrid_targets(landmarks, hidden_silhouette(reference_yaw, threshold)));
}

/**
 * Refines a coarse pose. The side hidden at the coarse yaw gets its 2D
 * silhouette replaced by the 3D landmarks, the mean face is re-solved against
 * all 68 hybrid targets and depth_offset is initialised by centroid alignment.
 */
inline Pose refine_pose(const model::ModelBasis& basis, const LandmarkSet& landmarks, const Pose& coarse,
                        double threshold = default_visibility_threshold)
{
    validate(landmarks);
    validate(coarse);
    const Eigen::Matrix3Xd mean_landmarks = model::landmarks_of(basis, model::FaceParams::zero(basis));
    Pose refined = solve_pose_hybrid(mean_landmarks, landmarks, coarse.yaw(), threshold);
    refined.depth_offset = initial_depth_offset(refined, mean_landmarks, landmarks);
    return refined;
}

} /* namespace camera */
} /* namespace mfit */

#endif /* MFIT_CAMERA_POSE_ESTIMATION_HPP */
