/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/core/landmark_layout.hpp
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

#ifndef MFIT_CORE_LANDMARK_LAYOUT_HPP
#define MFIT_CORE_LANDMARK_LAYOUT_HPP

#include "mfit/core/types.hpp"

#include <vector>

namespace mfit {

/**
 * Semantic partition of the 68 landmarks. The usual 1-based numbering is
 * 1-17 silhouette (1-9 left, 10 chin middle, 11-17 right), 18-68 inner
 * features. Everything here is 0-based.
 */
namespace layout {

inline constexpr int silhouette_left_begin = 0;  // landmarks 1..9
inline constexpr int silhouette_left_end = 9;
inline constexpr int chin_middle = 9;            // landmark 10
inline constexpr int silhouette_right_begin = 10; // landmarks 11..17
inline constexpr int silhouette_right_end = 17;
inline constexpr int inner_begin = 17;           // landmarks 18..68
inline constexpr int inner_end = num_landmarks;

enum class Side { none, left, right };

inline bool is_silhouette(int index, Side side)
{
    switch (side)
    {
    case Side::left:
        return index >= silhouette_left_begin && index < silhouette_left_end;
    case Side::right:
        return index >= silhouette_right_begin && index < silhouette_right_end;
    case Side::none:
        break;
    }
    return false;
}

/// Indices of one silhouette side followed by the 51 inner landmarks. The chin middle is excluded.
inline std::vector<int> side_with_inner(Side side)
{
    std::vector<int> indices;
    const int begin = side == Side::left ? silhouette_left_begin : silhouette_right_begin;
    const int end = side == Side::left ? silhouette_left_end : silhouette_right_end;
    for (int i = begin; i < end; ++i)
        indices.push_back(i);
    for (int i = inner_begin; i < inner_end; ++i)
        indices.push_back(i);
    return indices;
}

inline const char* to_string(Side side)
{
    switch (side)
    {
    case Side::left:
        return "left";
    case Side::right:
        return "right";
    case Side::none:
        break;
    }
    return "none";
}

} /* namespace layout */
} /* namespace mfit */

#endif /* MFIT_CORE_LANDMARK_LAYOUT_HPP */
