/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/io/landmarks_io.hpp
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

#ifndef MFIT_IO_LANDMARKS_IO_HPP
#define MFIT_IO_LANDMARKS_IO_HPP

#include "mfit/camera/pose.hpp"
#include "mfit/core/types.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

namespace mfit {
namespace io {

inline constexpr int landmarks_format_version = 1;

/*
 * Landmark file (JSON):
 *
 *   {
 *     "format_version": 1,
 *     "image_width": 512, "image_height": 512,
 *     "points_2d": [[x, y], ...],     68 entries, pixels
 *     "points_3d": [[x, y, z], ...]   68 entries, pixels; z is relative depth
 *   }
 *
 * Entries follow the semantic 68-point order: 1-17 silhouette (1-9 left,
 * 10 chin middle, 11-17 right), 18-68 inner features. A null coordinate is
 * read as NaN and rejected.
 */

namespace detail {

inline double coordinate(const nlohmann::json& value)
{
    if (value.is_null())
        return std::numeric_limits<double>::quiet_NaN();
    if (value.is_number())
        return value.get<double>();
    if (value.is_string())
    {
        const auto text = value.get<std::string>();
        if (text == "NaN" || text == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        if (text == "Infinity" || text == "inf")
            return std::numeric_limits<double>::infinity();
        if (text == "-Infinity" || text == "-inf")
            return -std::numeric_limits<double>::infinity();
    }
    throw FormatError("landmark coordinate must be a number");
}

template <int Dim>
Eigen::Matrix<double, Dim, Eigen::Dynamic> read_points(const nlohmann::json& j, const char* name)
{
    if (!j.contains(name))
        throw FormatError(std::string("landmark file is missing '") + name + "'");
    const auto& points = j.at(name);
    if (!points.is_array())
        throw FormatError(std::string("'") + name + "' must be an array");
    if (points.size() != static_cast<std::size_t>(num_landmarks))
        throw FormatError(std::string("'") + name + "' has " + std::to_string(points.size()) + " points, expected " +
                          std::to_string(num_landmarks));
    Eigen::Matrix<double, Dim, Eigen::Dynamic> out(Dim, num_landmarks);
    for (int i = 0; i < num_landmarks; ++i)
    {
        const auto& p = points[static_cast<std::size_t>(i)];
        if (!p.is_array() || p.size() != static_cast<std::size_t>(Dim))
            throw FormatError(std::string("'") + name + "' landmark " + std::to_string(i + 1) + " must have " +
                              std::to_string(Dim) + " coordinates");
        for (int d = 0; d < Dim; ++d)
            out(d, i) = coordinate(p[static_cast<std::size_t>(d)]);
        if (!out.col(i).allFinite())
            throw FormatError(std::string("'") + name + "' landmark " + std::to_string(i + 1) +
                              " has a non-finite coordinate");
    }
    return out;
}

} /* namespace detail */

inline camera::LandmarkSet landmarks_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw FormatError("landmark file must be a JSON object");
    try
    {
        if (j.contains("format_version") && j.at("format_version").get<int>() != landmarks_format_version)
            throw FormatError("unsupported landmark format version");
        camera::LandmarkSet landmarks;
        landmarks.image_width = j.value("image_width", 0.0);
        landmarks.image_height = j.value("image_height", 0.0);
        landmarks.points_2d = detail::read_points<2>(j, "points_2d");
        landmarks.points_3d = detail::read_points<3>(j, "points_3d");
        return landmarks;
    } catch (const nlohmann::json::exception& e)
    {
        throw FormatError(std::string("malformed landmark file: ") + e.what());
    }
}

inline nlohmann::json landmarks_to_json(const camera::LandmarkSet& landmarks)
{
    camera::validate(landmarks);
    nlohmann::json j;
    j["format_version"] = landmarks_format_version;
    j["image_width"] = landmarks.image_width;
    j["image_height"] = landmarks.image_height;
    j["points_2d"] = nlohmann::json::array();
    j["points_3d"] = nlohmann::json::array();
    for (int i = 0; i < num_landmarks; ++i)
    {
        j["points_2d"].push_back({landmarks.points_2d(0, i), landmarks.points_2d(1, i)});
        j["points_3d"].push_back({landmarks.points_3d(0, i), landmarks.points_3d(1, i), landmarks.points_3d(2, i)});
    }
    return j;
}

/// Reads and validates a landmark file. Errors name the offending field or landmark (1-based).
inline camera::LandmarkSet load_landmarks(const std::filesystem::path& path)
{
    std::ifstream file(path);
    if (!file)
        throw FormatError("cannot open landmark file '" + path.string() + "'");
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(file);
    } catch (const nlohmann::json::parse_error& e)
    {
        throw FormatError("landmark file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return landmarks_from_json(j);
}

inline void save_landmarks(const camera::LandmarkSet& landmarks, const std::filesystem::path& path)
{
    std::ofstream file(path, std::ios::trunc);
    if (!file)
        throw FormatError("cannot open '" + path.string() + "' for writing");
    file << landmarks_to_json(landmarks).dump(2) << '\n';
    if (!file)
        throw FormatError("failed writing '" + path.string() + "'");
}

} /* namespace io */
} /* namespace mfit */

#endif /* MFIT_IO_LANDMARKS_IO_HPP */
