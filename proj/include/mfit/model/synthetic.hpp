/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/model/synthetic.hpp
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

#ifndef MFIT_MODEL_SYNTHETIC_HPP
#define MFIT_MODEL_SYNTHETIC_HPP

#include "mfit/core/landmark_layout.hpp"
#include "mfit/core/types.hpp"
#include "mfit/model/model_basis.hpp"

#include "Eigen/Core"
#include "Eigen/QR"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace mfit {
namespace model {

namespace detail {

constexpr double deg = std::numbers::pi / 180.0;

// Frontal (x, y) positions in mm of the 51 inner landmarks (18-68) on a face
// with the reference half extents below. Image y points down.
constexpr std::array<std::array<double, 2>, 51> inner_landmark_targets_mm{{
    // brows 18-27
    {-55, -36}, {-45, -40}, {-34, -41}, {-23, -40}, {-12, -37},
    {12, -37}, {23, -40}, {34, -41}, {45, -40}, {55, -36},
    // nose bridge 28-31, nostrils 32-36
    {0, -24}, {0, -15}, {0, -6}, {0, 3},
    {-13, 14}, {-7, 16}, {0, 17}, {7, 16}, {13, 14},
    // eyes 37-48
    {-44, -22}, {-37, -26}, {-27, -26}, {-20, -22}, {-27, -18}, {-37, -18},
    {20, -22}, {27, -26}, {37, -26}, {44, -22}, {37, -18}, {27, -18},
    // outer lips 49-60
    {-25, 40}, {-16, 35}, {-7, 32}, {0, 33}, {7, 32}, {16, 35},
    {25, 40}, {16, 46}, {7, 49}, {0, 50}, {-7, 49}, {-16, 46},
    // inner lips 61-68
    {-19, 40}, {-7, 38}, {0, 38}, {7, 38}, {19, 40}, {7, 42}, {0, 42}, {-7, 42},
}};

// Reference half-extents the inner targets above were laid out for.
constexpr double reference_half_width = 75.0;
constexpr double reference_half_height = 85.0;

template <typename Distance>
int nearest_unused(int num_vertices, const std::vector<bool>& used, const std::vector<bool>& preferred,
                   Distance&& distance)
{
    int best = -1;
    bool best_preferred = false;
    double best_distance = std::numeric_limits<double>::infinity();
    for (int v = 0; v < num_vertices; ++v)
    {
        if (used[v])
            continue;
        const double d = distance(v);
        // A preferred vertex always wins over a non-preferred one.
        if ((preferred[v] && !best_preferred) || (preferred[v] == best_preferred && d < best_distance))
        {
            best = v;
            best_distance = d;
            best_preferred = preferred[v];
        }
    }
    return best;
}

} /* namespace detail */

/**
 * Generates a deterministic synthetic face model.
 *
 * The mean is a face-like patch on the front of an ellipsoid (about 170 mm
 * tall, x right, y down, z towards the camera) with a nose bump. Shape and
 * expression columns are smooth random deformation fields (sums of Gaussian
 * bumps), jointly orthonormalised and scaled so that a unit coefficient moves
 * the vertices by 1 mm RMS. Expression fields live on the lower face.
 * Eigenvalues decay geometrically.
 *
 * The 68 landmarks are picked automatically: a 17-point jaw silhouette ordered
 * left to right with the chin middle at landmark 10, then the usual
 * brow/nose/eye/mouth layout.
 *
 * @param[in] seed Seed for all random choices; equal seeds give bit-identical models.
 * @param[in] num_vertices Vertex count V, at least 100.
 * @param[in] num_shape Number of shape components, at least 1.
 * @param[in] num_expr Number of expression components, at least 1.
 * @return The generated model.
 */
inline ModelBasis generate_synthetic_basis(std::uint64_t seed, int num_vertices = 2000, int num_shape = 40,
                                           int num_expr = 10)
{
    using detail::deg;
    if (num_vertices < 100)
        throw InvalidInput("synthetic model needs at least 100 vertices, got " + std::to_string(num_vertices));
    if (num_shape < 1 || num_expr < 1)
        throw InvalidInput("synthetic model needs at least one shape and one expression component");
    if (num_shape + num_expr > 3 * num_vertices)
        throw InvalidInput("more basis components than coordinates");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double half_width = detail::reference_half_width * (0.95 + 0.1 * unit(rng));
    const double half_height = detail::reference_half_height * (0.95 + 0.1 * unit(rng));
    const double depth = 60.0 * (0.95 + 0.1 * unit(rng));
    const double nose_height = 25.0 * (0.9 + 0.2 * unit(rng));

    const double max_azimuth = 95.0 * deg;
    const double max_elevation = 80.0 * deg;
    const int cols = static_cast<int>(std::ceil(std::sqrt(num_vertices * 1.1)));
    const int rows = (num_vertices + cols - 1) / cols;

    ModelBasis basis;
    const int n = num_vertices;
    Eigen::Matrix3Xd points(3, n);
    std::vector<double> azimuth(n), elevation(n);
    for (int k = 0; k < n; ++k)
    {
        const int r = k / cols;
        const int c = k % cols;
        const double phi = -max_elevation + 2.0 * max_elevation * r / (rows - 1);
        const double theta = -max_azimuth + 2.0 * max_azimuth * c / (cols - 1);
        azimuth[k] = theta;
        elevation[k] = phi;
        const double x = half_width * std::cos(phi) * std::sin(theta);
        const double y = half_height * std::sin(phi);
        const double nose = nose_height * std::exp(-(x * x) / (2.0 * 10.0 * 10.0) -
                                                   (y - 5.0) * (y - 5.0) / (2.0 * 18.0 * 18.0));
        const double z = depth * std::cos(phi) * std::cos(theta) + nose;
        points.col(k) = Eigen::Vector3d(x, y, z);
    }
    basis.mean = Eigen::Map<const Eigen::VectorXd>(points.data(), 3 * n);

    for (int r = 0; r + 1 < rows; ++r)
    {
        for (int c = 0; c + 1 < cols; ++c)
        {
            const int v00 = r * cols + c;
            const int v01 = v00 + 1;
            const int v10 = v00 + cols;
            const int v11 = v10 + 1;
            if (v11 >= n)
                continue;
            basis.triangles.push_back({v00, v10, v01});
            basis.triangles.push_back({v01, v10, v11});
        }
    }

    int nose_tip = 0;
    points.row(2).maxCoeff(&nose_tip);
    basis.nose_tip_index = nose_tip;

    // Landmarks.
    std::vector<bool> used(n, false);
    std::vector<bool> front(n);
    for (int v = 0; v < n; ++v)
        front[v] = points(2, v) > 0.0;

    basis.landmark_indices.reserve(num_landmarks);
    const double jaw_azimuth = 80.0 * deg;
    const double ear_elevation = 0.0;
    const double chin_elevation = 62.0 * deg;
    for (int j = 0; j < layout::inner_begin; ++j)
    {
        double t = 0.0;
        if (j < layout::silhouette_left_end)
            t = -1.0 + static_cast<double>(j) / layout::silhouette_left_end;
        else if (j > layout::chin_middle)
            t = static_cast<double>(j - layout::chin_middle) / (layout::silhouette_right_end - layout::silhouette_right_begin);
        const double target_theta = jaw_azimuth * t;
        const double target_phi = ear_elevation + (chin_elevation - ear_elevation) * std::cos(t * std::numbers::pi / 2.0);
        const int v = detail::nearest_unused(n, used, front, [&](int i) {
            const double dt = azimuth[i] - target_theta;
            const double dp = elevation[i] - target_phi;
            return dt * dt + dp * dp;
        });
        used[v] = true;
        basis.landmark_indices.push_back(v);
    }
    for (const auto& target : detail::inner_landmark_targets_mm)
    {
        const double tx = target[0] / detail::reference_half_width;
        const double ty = target[1] / detail::reference_half_height;
        const int v = detail::nearest_unused(n, used, front, [&](int i) {
            const double dx = points(0, i) / half_width - tx;
            const double dy = points(1, i) / half_height - ty;
            return dx * dx + dy * dy;
        });
        used[v] = true;
        basis.landmark_indices.push_back(v);
    }

    // Deformation fields, expression first so those columns stay on the lower face after orthogonalisation.
    const int num_components = num_shape + num_expr;
    std::vector<int> lower_face;
    for (int v = 0; v < n; ++v)
    {
        if (points(1, v) > 10.0 && front[v])
            lower_face.push_back(v);
    }
    Eigen::MatrixXd fields = Eigen::MatrixXd::Zero(3 * n, num_components);
    constexpr int bumps_per_field = 6;
    for (int m = 0; m < num_components; ++m)
    {
        const bool expression = m < num_expr;
        for (int b = 0; b < bumps_per_field; ++b)
        {
            int center_index = static_cast<int>(unit(rng) * n) % n;
            if (expression && !lower_face.empty())
                center_index = lower_face[static_cast<std::size_t>(unit(rng) * lower_face.size()) % lower_face.size()];
            const Eigen::Vector3d center = points.col(center_index);
            const double width = 20.0 + 25.0 * unit(rng);
            const Eigen::Vector3d direction(gauss(rng), gauss(rng), gauss(rng));
            for (int v = 0; v < n; ++v)
            {
                const double falloff = std::exp(-(points.col(v) - center).squaredNorm() / (2.0 * width * width));
                fields.block<3, 1>(3 * v, m) += falloff * direction;
            }
        }
    }
    // Remove the infinitesimal similarity motions of the mean (3 translations,
    // 3 rotations, 1 scale) so that, as for a Procrustes-aligned PCA model, no
    // deformation mimics a change of pose.
    const Eigen::Vector3d centroid = points.rowwise().mean();
    Eigen::MatrixXd similarity = Eigen::MatrixXd::Zero(3 * n, 7);
    for (int v = 0; v < n; ++v)
    {
        const Eigen::Vector3d p = points.col(v) - centroid;
        for (int axis = 0; axis < 3; ++axis)
        {
            similarity(3 * v + axis, axis) = 1.0;
            similarity.block<3, 1>(3 * v, 3 + axis) = Eigen::Vector3d::Unit(axis).cross(p);
        }
        similarity.block<3, 1>(3 * v, 6) = p;
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> similarity_qr(similarity);
    const Eigen::MatrixXd motions = similarity_qr.householderQ() * Eigen::MatrixXd::Identity(3 * n, 7);
    fields -= motions * (motions.transpose() * fields);

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(fields);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(3 * n, num_components);
    const double column_scale = std::sqrt(3.0 * n);
    basis.expr_basis = q.leftCols(num_expr) * column_scale;
    basis.shape_basis = q.rightCols(num_shape) * column_scale;

    basis.shape_eigenvalues.resize(num_shape);
    for (int k = 0; k < num_shape; ++k)
        basis.shape_eigenvalues(k) = 9.0 * std::pow(0.85, k);
    basis.expr_eigenvalues.resize(num_expr);
    for (int k = 0; k < num_expr; ++k)
        basis.expr_eigenvalues(k) = 4.0 * std::pow(0.7, k);

    validate(basis);
    return basis;
}

} /* namespace model */
} /* namespace mfit */

#endif /* MFIT_MODEL_SYNTHETIC_HPP */
