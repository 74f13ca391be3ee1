/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/fitting/energy.hpp
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

#ifndef MFIT_FITTING_ENERGY_HPP
#define MFIT_FITTING_ENERGY_HPP

#include "mfit/camera/pose.hpp"
#include "mfit/core/types.hpp"
#include "mfit/fitting/weights.hpp"
#include "mfit/model/model_basis.hpp"

#include "Eigen/Core"

#include <cmath>
#include <limits>
#include <vector>

namespace mfit {
namespace fitting {

/// Sum of squared distances between projected model landmarks and \p targets (2 x 68).
inline double energy_2d(const Eigen::Matrix3Xd& model_landmarks, const camera::Pose& pose,
                        const Eigen::Matrix2Xd& targets)
{
    return (camera::project(pose, model_landmarks) - targets).squaredNorm();
}

inline double energy_2d(const model::ModelBasis& basis, const model::FaceParams& params, const camera::Pose& pose,
                        const camera::LandmarkSet& landmarks)
{
    return energy_2d(model::landmarks_of(basis, params), pose, landmarks.points_2d);
}

/// Sum of squared distances between scale * R * landmark and L_3d + depth_offset.
inline double energy_3d(const Eigen::Matrix3Xd& model_landmarks, const camera::Pose& pose,
                        const Eigen::Matrix3Xd& detected_3d)
{
    return ((camera::to_camera_frame(pose, model_landmarks) - detected_3d).colwise() - pose.depth_offset)
        .squaredNorm();
}

inline double energy_3d(const model::ModelBasis& basis, const model::FaceParams& params, const camera::Pose& pose,
                        const camera::LandmarkSet& landmarks)
{
    return energy_3d(model::landmarks_of(basis, params), pose, landmarks.points_3d);
}

/// Mahalanobis shape and expression prior, scaled by lambda_2d + lambda_3d.
inline double prior_energy(const model::FaceParams& params, const Weights& weights,
                           const Eigen::VectorXd& shape_eigenvalues, const Eigen::VectorXd& expr_eigenvalues,
                           const WeightConfig& cfg)
{
    const double total = weights.lambda_2d + weights.lambda_3d;
    const double shape = (params.alpha.array().square() / shape_eigenvalues.array()).sum();
    const double expr = (params.beta.array().square() / expr_eigenvalues.array()).sum();
    return cfg.lambda_alpha * total * shape + cfg.lambda_beta * total * expr;
}

inline double prior_energy(const model::FaceParams& params, const Weights& weights, const model::ModelBasis& basis,
                           const WeightConfig& cfg)
{
    model::check_dimensions(basis, params);
    return prior_energy(params, weights, basis.shape_eigenvalues, basis.expr_eigenvalues, cfg);
}

struct EnergyTerms
{
    double e_2d = 0.0;
    double e_3d = 0.0;
    double e_prior = 0.0;
    double e_fit = 0.0;
};

/**
 * The joint fitting objective as a stacked residual
 *
 *   [ sqrt(lambda_2d) * (s [R X_i]_xy + t - T_i)                         ]  2 per landmark
 *   [ sqrt(lambda_3d) * (s R X_i - L_3d,i - depth_offset)                 ]  3 per landmark
 *   [ sqrt(lambda_alpha (lambda_2d + lambda_3d)) alpha_k / sqrt(delta_k)  ]
 *   [ sqrt(lambda_beta (lambda_2d + lambda_3d)) beta_k / sqrt(delta_k)    ]
 *
 * whose squared norm is lambda_2d E_2d + lambda_3d E_3d + E_p. The variables
 * are x = [alpha; beta; depth_offset] followed, when the pose is free, by
 * [scale; pitch; yaw; roll; tx; ty]. With a fixed pose the residual is linear in x.
 */
class JointResidual
{
public:
    static constexpr int pose_variables = 6;

    JointResidual(const model::LandmarkBasis& landmark_basis, const Eigen::VectorXd& shape_eigenvalues,
                  const Eigen::VectorXd& expr_eigenvalues, const camera::Pose& pose, Eigen::Matrix2Xd targets_2d,
                  Eigen::Matrix3Xd targets_3d, const Weights& weights, const WeightConfig& cfg, bool free_pose = true)
        : basis_(landmark_basis), pose_(pose), targets_2d_(std::move(targets_2d)), targets_3d_(std::move(targets_3d)),
          weights_(weights), num_shape_(static_cast<int>(shape_eigenvalues.size())),
          num_expr_(static_cast<int>(expr_eigenvalues.size())), free_pose_(free_pose)
    {
        const double total = weights.lambda_2d + weights.lambda_3d;
        shape_prior_ = (cfg.lambda_alpha * total / shape_eigenvalues.array()).sqrt();
        expr_prior_ = (cfg.lambda_beta * total / expr_eigenvalues.array()).sqrt();
        sqrt_2d_ = std::sqrt(weights.lambda_2d);
        sqrt_3d_ = std::sqrt(weights.lambda_3d);
    }

    bool free_pose() const { return free_pose_; }
    int num_coefficients() const { return num_shape_ + num_expr_; }
    int num_variables() const { return num_coefficients() + 3 + (free_pose_ ? pose_variables : 0); }
    int num_residuals() const { return 5 * num_landmarks + num_shape_ + num_expr_; }

    Eigen::VectorXd pack(const model::FaceParams& params, const camera::Pose& pose) const
    {
        Eigen::VectorXd x(num_variables());
        x.head(num_coefficients()) << params.alpha, params.beta;
        x.segment<3>(num_coefficients()) = pose.depth_offset;
        if (free_pose_)
        {
            x.tail<pose_variables>() << pose.scale, pose.angles.pitch, pose.angles.yaw, pose.angles.roll,
                pose.translation.x(), pose.translation.y();
        }
        return x;
    }

    model::FaceParams unpack_params(const Eigen::VectorXd& x) const
    {
        return {x.head(num_shape_), x.segment(num_shape_, num_expr_)};
    }

    /// Pose encoded in \p x; with a fixed pose only depth_offset is taken from x.
    camera::Pose unpack_pose(const Eigen::VectorXd& x) const
    {
        camera::Pose pose = pose_;
        pose.depth_offset = x.segment<3>(num_coefficients());
        if (free_pose_)
        {
            const auto p = x.tail<pose_variables>();
            pose.scale = p(0);
            pose.angles = {p(1), p(2), p(3)};
            pose.translation = {p(4), p(5)};
        }
        return pose;
    }

    /// Residual; NaN-filled if x has a non-positive scale so that such steps are rejected.
    Eigen::VectorXd residual(const Eigen::VectorXd& x) const
    {
        const model::FaceParams params = unpack_params(x);
        const camera::Pose pose = unpack_pose(x);
        Eigen::VectorXd r(num_residuals());
        if (!(pose.scale > 0.0))
        {
            r.setConstant(std::numeric_limits<double>::quiet_NaN());
            return r;
        }
        const Eigen::Matrix3Xd camera = camera::to_camera_frame(pose, basis_.points(params));
        for (int i = 0; i < num_landmarks; ++i)
        {
            r.segment<2>(2 * i) = sqrt_2d_ * (camera.col(i).head<2>() + pose.translation - targets_2d_.col(i));
            r.segment<3>(2 * num_landmarks + 3 * i) =
                sqrt_3d_ * (camera.col(i) - targets_3d_.col(i) - pose.depth_offset);
        }
        r.segment(5 * num_landmarks, num_shape_) = shape_prior_.matrix().cwiseProduct(params.alpha);
        r.segment(5 * num_landmarks + num_shape_, num_expr_) = expr_prior_.matrix().cwiseProduct(params.beta);
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const
    {
        const model::FaceParams params = unpack_params(x);
        const camera::Pose pose = unpack_pose(x);
        const int coefficients = num_coefficients();
        const int offset_col = coefficients;
        const int pose_col = coefficients + 3;

        const auto& a = pose.angles;
        const double cp = std::cos(a.pitch), sp = std::sin(a.pitch);
        const double cy = std::cos(a.yaw), sy = std::sin(a.yaw);
        const double cr = std::cos(a.roll), sr = std::sin(a.roll);
        Eigen::Matrix3d rx, ry, rz, drx, dry, drz;
        rx << 1, 0, 0, 0, cp, -sp, 0, sp, cp;
        ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
        rz << cr, -sr, 0, sr, cr, 0, 0, 0, 1;
        drx << 0, 0, 0, 0, -sp, -cp, 0, cp, -sp;
        dry << -sy, 0, cy, 0, 0, 0, -cy, 0, -sy;
        drz << -sr, -cr, 0, cr, -sr, 0, 0, 0, 0;
        const Eigen::Matrix3d rotation = rz * ry * rx;
        const Eigen::Matrix3d sr_matrix = pose.scale * rotation;
        const Eigen::Matrix3d d_pitch = pose.scale * rz * ry * drx;
        const Eigen::Matrix3d d_yaw = pose.scale * rz * dry * rx;
        const Eigen::Matrix3d d_roll = pose.scale * drz * ry * rx;
        const Eigen::Matrix3Xd points = basis_.points(params);

        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(num_residuals(), num_variables());
        Eigen::Matrix<double, 3, Eigen::Dynamic> block(3, coefficients);
        Eigen::Matrix<double, 3, pose_variables> pose_block;
        for (int i = 0; i < num_landmarks; ++i)
        {
            block.leftCols(num_shape_) = sr_matrix * basis_.shape_basis.middleRows<3>(3 * i);
            block.rightCols(num_expr_) = sr_matrix * basis_.expr_basis.middleRows<3>(3 * i);
            const int row_2d = 2 * i;
            const int row_3d = 2 * num_landmarks + 3 * i;
            j.block(row_2d, 0, 2, coefficients) = sqrt_2d_ * block.topRows<2>();
            j.block(row_3d, 0, 3, coefficients) = sqrt_3d_ * block;
            j.block<3, 3>(row_3d, offset_col) = -sqrt_3d_ * Eigen::Matrix3d::Identity();
            if (free_pose_)
            {
                const Eigen::Vector3d p = points.col(i);
                pose_block.setZero();
                pose_block.col(0) = rotation * p;
                pose_block.col(1) = d_pitch * p;
                pose_block.col(2) = d_yaw * p;
                pose_block.col(3) = d_roll * p;
                j.block<2, 4>(row_2d, pose_col) = sqrt_2d_ * pose_block.topLeftCorner<2, 4>();
                j.block<2, 2>(row_2d, pose_col + 4) = sqrt_2d_ * Eigen::Matrix2d::Identity();
                j.block<3, 4>(row_3d, pose_col) = sqrt_3d_ * pose_block.leftCols<4>();
            }
        }
        for (int k = 0; k < num_shape_; ++k)
            j(5 * num_landmarks + k, k) = shape_prior_(k);
        for (int k = 0; k < num_expr_; ++k)
            j(5 * num_landmarks + num_shape_ + k, num_shape_ + k) = expr_prior_(k);
        return j;
    }

    EnergyTerms energies(const Eigen::VectorXd& x) const
    {
        const model::FaceParams params = unpack_params(x);
        const camera::Pose pose = unpack_pose(x);
        const Eigen::Matrix3Xd points = basis_.points(params);
        EnergyTerms terms;
        terms.e_2d = energy_2d(points, pose, targets_2d_);
        terms.e_3d = energy_3d(points, pose, targets_3d_);
        terms.e_prior = (shape_prior_.matrix().cwiseProduct(params.alpha)).squaredNorm() +
                        (expr_prior_.matrix().cwiseProduct(params.beta)).squaredNorm();
        terms.e_fit = weights_.lambda_2d * terms.e_2d + weights_.lambda_3d * terms.e_3d + terms.e_prior;
        return terms;
    }

private:
    const model::LandmarkBasis& basis_;
    camera::Pose pose_;
    Eigen::Matrix2Xd targets_2d_;
    Eigen::Matrix3Xd targets_3d_;
    Weights weights_;
    int num_shape_;
    int num_expr_;
    bool free_pose_;
    Eigen::ArrayXd shape_prior_;
    Eigen::ArrayXd expr_prior_;
    double sqrt_2d_ = 1.0;
    double sqrt_3d_ = 0.0;
};

} /* namespace fitting */
} /* namespace mfit */

#endif /* MFIT_FITTING_ENERGY_HPP */
