/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/model/model_basis.hpp
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

#ifndef MFIT_MODEL_MODEL_BASIS_HPP
#define MFIT_MODEL_MODEL_BASIS_HPP

#include "mfit/core/types.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mfit {
namespace model {

/**
 * A linear face model: a mesh is the mean plus a linear combination of
 * shape (identity) and expression basis columns.
 *
 * All coordinates are in millimetres and stored flat as [x0 y0 z0 x1 ...].
 * The eigenvalues are the variances of the corresponding coefficients and are
 * used by the Mahalanobis prior during fitting.
 */
struct ModelBasis
{
    Eigen::VectorXd mean;              ///< 3V
    Eigen::MatrixXd shape_basis;       ///< 3V x N_alpha
    Eigen::MatrixXd expr_basis;        ///< 3V x N_beta
    Eigen::VectorXd shape_eigenvalues; ///< N_alpha, strictly positive
    Eigen::VectorXd expr_eigenvalues;  ///< N_beta, strictly positive
    std::vector<int> landmark_indices; ///< 68 distinct vertex indices
    std::vector<Triangle> triangles;
    int nose_tip_index = 0;

    int num_vertices() const { return static_cast<int>(mean.size() / 3); }
    int num_shape() const { return static_cast<int>(shape_basis.cols()); }
    int num_expr() const { return static_cast<int>(expr_basis.cols()); }
};

/// Shape (alpha) and expression (beta) coefficients of a ModelBasis.
struct FaceParams
{
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;

    static FaceParams zero(const ModelBasis& basis)
    {
        return {Eigen::VectorXd::Zero(basis.num_shape()), Eigen::VectorXd::Zero(basis.num_expr())};
    }
};

/**
 * Checks every structural invariant of \p basis and throws InvalidInput with a
 * description of the first violation found.
 */
inline void validate(const ModelBasis& basis)
{
    const auto fail = [](const std::string& what) { throw InvalidInput("invalid model basis: " + what); };
    if (basis.mean.size() == 0 || basis.mean.size() % 3 != 0)
        fail("mean must hold 3*V coordinates, got " + std::to_string(basis.mean.size()));
    const auto rows = basis.mean.size();
    if (basis.shape_basis.rows() != rows)
        fail("shape_basis has " + std::to_string(basis.shape_basis.rows()) + " rows, expected " + std::to_string(rows));
    if (basis.expr_basis.rows() != rows)
        fail("expr_basis has " + std::to_string(basis.expr_basis.rows()) + " rows, expected " + std::to_string(rows));
    if (basis.shape_eigenvalues.size() != basis.shape_basis.cols())
        fail("shape eigenvalue count " + std::to_string(basis.shape_eigenvalues.size()) +
             " does not match shape basis column count " + std::to_string(basis.shape_basis.cols()));
    if (basis.expr_eigenvalues.size() != basis.expr_basis.cols())
        fail("expression eigenvalue count " + std::to_string(basis.expr_eigenvalues.size()) +
             " does not match expression basis column count " + std::to_string(basis.expr_basis.cols()));
    if (!(basis.shape_eigenvalues.array() > 0.0).all() || !(basis.expr_eigenvalues.array() > 0.0).all())
        fail("all eigenvalues must be strictly positive");
    if (!basis.mean.allFinite() || !basis.shape_basis.allFinite() || !basis.expr_basis.allFinite() ||
        !basis.shape_eigenvalues.allFinite() || !basis.expr_eigenvalues.allFinite())
        fail("non-finite model data");

    const int num_vertices = basis.num_vertices();
    if (static_cast<int>(basis.landmark_indices.size()) != num_landmarks)
        fail("expected " + std::to_string(num_landmarks) + " landmark indices, got " +
             std::to_string(basis.landmark_indices.size()));
    std::vector<int> sorted = basis.landmark_indices;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= num_vertices)
        fail("landmark index out of range [0, " + std::to_string(num_vertices) + ")");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        fail("landmark indices must be distinct");
    if (basis.nose_tip_index < 0 || basis.nose_tip_index >= num_vertices)
        fail("nose tip index out of range");
    for (const auto& tri : basis.triangles)
    {
        for (int v : tri)
        {
            if (v < 0 || v >= num_vertices)
                fail("triangle references vertex " + std::to_string(v) + " out of range");
        }
    }
}

inline void check_dimensions(const ModelBasis& basis, const FaceParams& params)
{
    if (params.alpha.size() != basis.num_shape() || params.beta.size() != basis.num_expr())
    {
        throw InvalidInput("coefficient dimension mismatch: got " + std::to_string(params.alpha.size()) + "/" +
                           std::to_string(params.beta.size()) + " coefficients, model has " +
                           std::to_string(basis.num_shape()) + "/" + std::to_string(basis.num_expr()));
    }
    if (!params.alpha.allFinite() || !params.beta.allFinite())
        throw InvalidInput("non-finite face coefficients");
}

/**
 * Evaluates the linear model, mean + shape_basis * alpha + expr_basis * beta,
 * and returns it as a mesh with the model's topology.
 */
inline Mesh synthesize(const ModelBasis& basis, const FaceParams& params)
{
    check_dimensions(basis, params);
    const Eigen::VectorXd flat = basis.mean + basis.shape_basis * params.alpha + basis.expr_basis * params.beta;
    Mesh mesh;
    mesh.vertices = Eigen::Map<const Eigen::Matrix3Xd>(flat.data(), 3, basis.num_vertices());
    mesh.triangles = basis.triangles;
    return mesh;
}

/**
 * The rows of a model restricted to its landmark vertices. Fitting only ever
 * touches these 3*68 rows, so they are gathered once up front.
 */
struct LandmarkBasis
{
    Eigen::VectorXd mean;        ///< 3*68
    Eigen::MatrixXd shape_basis; ///< 3*68 x N_alpha
    Eigen::MatrixXd expr_basis;  ///< 3*68 x N_beta

    explicit LandmarkBasis(const ModelBasis& basis)
        : mean(3 * num_landmarks), shape_basis(3 * num_landmarks, basis.num_shape()),
          expr_basis(3 * num_landmarks, basis.num_expr())
    {
        for (int j = 0; j < num_landmarks; ++j)
        {
            const int v = basis.landmark_indices[j];
            mean.segment<3>(3 * j) = basis.mean.segment<3>(3 * v);
            shape_basis.middleRows<3>(3 * j) = basis.shape_basis.middleRows<3>(3 * v);
            expr_basis.middleRows<3>(3 * j) = basis.expr_basis.middleRows<3>(3 * v);
        }
    }

    Eigen::Matrix3Xd points(const FaceParams& params) const
    {
        const Eigen::VectorXd flat = mean + shape_basis * params.alpha + expr_basis * params.beta;
        return Eigen::Map<const Eigen::Matrix3Xd>(flat.data(), 3, num_landmarks);
    }
};

/// The 68 landmark positions of the face described by \p params, in landmark order.
inline Eigen::Matrix3Xd landmarks_of(const ModelBasis& basis, const FaceParams& params)
{
    check_dimensions(basis, params);
    return LandmarkBasis(basis).points(params);
}

} /* namespace model */
} /* namespace mfit */

#endif /* MFIT_MODEL_MODEL_BASIS_HPP */
