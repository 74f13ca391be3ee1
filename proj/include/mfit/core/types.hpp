/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/core/types.hpp
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

#ifndef MFIT_CORE_TYPES_HPP
#define MFIT_CORE_TYPES_HPP

#include "Eigen/Core"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfit {

/// Number of semantic facial landmarks used throughout the library.
inline constexpr int num_landmarks = 68;

using Triangle = std::array<int, 3>;

/**
 * A triangle mesh. Vertices are stored column-wise (3 x V), which makes the
 * storage identical to the flat [x0 y0 z0 x1 y1 z1 ...] layout of a model's
 * mean and basis columns.
 */
struct Mesh
{
    Eigen::Matrix3Xd vertices;
    std::vector<Triangle> triangles;

    int num_vertices() const { return static_cast<int>(vertices.cols()); }
};

/// Input that violates a documented precondition (dimension mismatch, bad counts, ...).
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A geometric configuration that does not determine the requested quantity.
class DegenerateConfiguration : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent file contents.
class FormatError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} /* namespace mfit */

#endif /* MFIT_CORE_TYPES_HPP */
