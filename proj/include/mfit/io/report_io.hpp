/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/io/report_io.hpp
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

#ifndef MFIT_IO_REPORT_IO_HPP
#define MFIT_IO_REPORT_IO_HPP

#include "mfit/camera/pose.hpp"
#include "mfit/core/types.hpp"
#include "mfit/fitting/fit.hpp"
#include "mfit/model/model_basis.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace mfit {
namespace io {

inline constexpr int report_format_version = 1;

namespace detail {

inline std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::VectorXd from_vector(const nlohmann::json& j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path)
{
    std::ofstream file(path, std::ios::trunc);
    if (!file)
        throw FormatError("cannot open '" + path.string() + "' for writing");
    file << j.dump(2) << '\n';
    if (!file)
        throw FormatError("failed writing '" + path.string() + "'");
}

inline nlohmann::json read_json(const std::filesystem::path& path)
{
    std::ifstream file(path);
    if (!file)
        throw FormatError("cannot open '" + path.string() + "'");
    try
    {
        return nlohmann::json::parse(file);
    } catch (const nlohmann::json::parse_error& e)
    {
        throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline layout::Side side_from_string(const std::string& s)
{
    if (s == "left")
        return layout::Side::left;
    if (s == "right")
        return layout::Side::right;
    return layout::Side::none;
}

} /* namespace detail */

inline nlohmann::json params_to_json(const model::FaceParams& params)
{
    return {{"format_version", report_format_version},
            {"alpha", detail::to_vector(params.alpha)},
            {"beta", detail::to_vector(params.beta)}};
}

inline model::FaceParams params_from_json(const nlohmann::json& j)
{
    try
    {
        return {detail::from_vector(j.at("alpha")), detail::from_vector(j.at("beta"))};
    } catch (const nlohmann::json::exception& e)
    {
        throw FormatError(std::string("malformed parameter JSON: ") + e.what());
    }
}

inline nlohmann::json pose_to_json(const camera::Pose& pose)
{
    return {{"scale", pose.scale},
            {"pitch", pose.angles.pitch},
            {"yaw", pose.angles.yaw},
            {"roll", pose.angles.roll},
            {"translation", {pose.translation.x(), pose.translation.y()}},
            {"depth_offset", {pose.depth_offset.x(), pose.depth_offset.y(), pose.depth_offset.z()}}};
}

inline camera::Pose pose_from_json(const nlohmann::json& j)
{
    camera::Pose pose;
    pose.scale = j.at("scale").get<double>();
    pose.angles = {j.at("pitch").get<double>(), j.at("yaw").get<double>(), j.at("roll").get<double>()};
    const auto t = j.at("translation").get<std::vector<double>>();
    const auto d = j.at("depth_offset").get<std::vector<double>>();
    if (t.size() != 2 || d.size() != 3)
        throw FormatError("pose translation must have 2 entries and depth_offset 3");
    pose.translation = {t[0], t[1]};
    pose.depth_offset = {d[0], d[1], d[2]};
    return pose;
}

/// Fit report with the per-round weight and energy trace.
inline nlohmann::json report_to_json(const fitting::FitReport& report)
{
    nlohmann::json iterations = nlohmann::json::array();
    for (const auto& it : report.per_iteration)
    {
        iterations.push_back({{"yaw", it.yaw},
                              {"lambda_2d", it.lambda_2d},
                              {"lambda_3d", it.lambda_3d},
                              {"e_2d", it.e_2d},
                              {"e_3d", it.e_3d},
                              {"e_prior", it.e_prior},
                              {"e_fit", it.e_fit},
                              {"hidden_silhouette", layout::to_string(it.hidden)},
                              {"inner_steps", it.inner_steps},
                              {"inner_converged", it.inner_converged},
                              {"inner_energies", it.inner_energies}});
    }
    return {{"format_version", report_format_version},
            {"variant", fitting::to_string(report.variant)},
            {"converged", report.converged},
            {"params", params_to_json(report.params)},
            {"pose", pose_to_json(report.pose)},
            {"coarse_pose", pose_to_json(report.coarse_pose)},
            {"initial_pose", pose_to_json(report.initial_pose)},
            {"iterations", iterations},
            {"residuals_2d", report.residuals_2d},
            {"residuals_3d", report.residuals_3d}};
}

inline fitting::FitReport report_from_json(const nlohmann::json& j)
{
    try
    {
        fitting::FitReport report;
        const auto variant = fitting::parse_variant(j.at("variant").get<std::string>());
        if (!variant)
            throw FormatError("unknown variant in fit report");
        report.variant = *variant;
        report.converged = j.at("converged").get<bool>();
        report.params = params_from_json(j.at("params"));
        report.pose = pose_from_json(j.at("pose"));
        report.coarse_pose = pose_from_json(j.at("coarse_pose"));
        report.initial_pose = pose_from_json(j.at("initial_pose"));
        for (const auto& it : j.at("iterations"))
        {
            fitting::IterationRecord record;
            record.yaw = it.at("yaw").get<double>();
            record.lambda_2d = it.at("lambda_2d").get<double>();
            record.lambda_3d = it.at("lambda_3d").get<double>();
            record.e_2d = it.at("e_2d").get<double>();
            record.e_3d = it.at("e_3d").get<double>();
            record.e_prior = it.at("e_prior").get<double>();
            record.e_fit = it.at("e_fit").get<double>();
            record.hidden = detail::side_from_string(it.at("hidden_silhouette").get<std::string>());
            record.inner_steps = it.at("inner_steps").get<int>();
            record.inner_converged = it.at("inner_converged").get<bool>();
            record.inner_energies = it.at("inner_energies").get<std::vector<double>>();
            report.per_iteration.push_back(std::move(record));
        }
        report.residuals_2d = j.at("residuals_2d").get<std::vector<double>>();
        report.residuals_3d = j.at("residuals_3d").get<std::vector<double>>();
        return report;
    } catch (const nlohmann::json::exception& e)
    {
        throw FormatError(std::string("malformed fit report: ") + e.what());
    }
}

inline void save_params(const model::FaceParams& params, const std::filesystem::path& path)
{
    detail::write_json(params_to_json(params), path);
}

inline model::FaceParams load_params(const std::filesystem::path& path)
{
    return params_from_json(detail::read_json(path));
}

inline void save_report(const fitting::FitReport& report, const std::filesystem::path& path)
{
    detail::write_json(report_to_json(report), path);
}

inline fitting::FitReport load_report(const std::filesystem::path& path)
{
    return report_from_json(detail::read_json(path));
}

} /* namespace io */
} /* namespace mfit */

#endif /* MFIT_IO_REPORT_IO_HPP */
