/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: tests/test_io.cpp
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
#include "test_support.hpp"

#include "mfit/evaluation/benchmark.hpp"
#include "mfit/io/landmarks_io.hpp"
#include "mfit/io/obj.hpp"
#include "mfit/io/report_io.hpp"
#include "mfit/io/run_config.hpp"

#include "gtest/gtest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace mfit;
using namespace mfit::io;
using test::deg;

namespace {

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("mfit_io_test_" + name);
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string message_of(const nlohmann::json& j)
{
    try
    {
        landmarks_from_json(j);
    } catch (const FormatError& e)
    {
        return e.what();
    }
    return {};
}

int count_lines_starting_with(const std::string& text, const std::string& prefix)
{
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line))
        n += line.rfind(prefix, 0) == 0;
    return n;
}

} // namespace

TEST(LandmarkFile, RoundTripIsExact)
{
    const auto c = evaluation::make_synthetic_case(test::shared_basis(), 1, 45 * deg, evaluation::NoiseModel{});
    const auto path = temp_path("landmarks.json");
    save_landmarks(c.landmarks, path);
    const camera::LandmarkSet back = load_landmarks(path);
    EXPECT_EQ(back.points_2d, c.landmarks.points_2d);
    EXPECT_EQ(back.points_3d, c.landmarks.points_3d);
    EXPECT_EQ(back.image_width, c.landmarks.image_width);
    const std::string first = read_text(path);
    save_landmarks(back, path);
    EXPECT_EQ(read_text(path), first);
    std::filesystem::remove(path);
}

TEST(LandmarkFile, WrongCountNamesTheExpectedCount)
{
    const auto c = evaluation::make_synthetic_case(test::shared_basis(), 1, 0.0, evaluation::NoiseModel{});
    nlohmann::json j = landmarks_to_json(c.landmarks);
    j["points_2d"].erase(j["points_2d"].size() - 1);
    const std::string message = message_of(j);
    EXPECT_NE(message.find("67"), std::string::npos) << message;
    EXPECT_NE(message.find("expected 68"), std::string::npos) << message;
}

TEST(LandmarkFile, NonFiniteCoordinateNamesTheLandmark)
{
    const auto c = evaluation::make_synthetic_case(test::shared_basis(), 1, 0.0, evaluation::NoiseModel{});
    nlohmann::json j = landmarks_to_json(c.landmarks);
    j["points_3d"][41][2] = "NaN";
    EXPECT_NE(message_of(j).find("landmark 42"), std::string::npos) << message_of(j);
    j = landmarks_to_json(c.landmarks);
    j["points_2d"][4][0] = nullptr;
    EXPECT_NE(message_of(j).find("landmark 5"), std::string::npos) << message_of(j);
}

TEST(LandmarkFile, SchemaViolations)
{
    EXPECT_NE(message_of(nlohmann::json::array()), "");
    EXPECT_NE(message_of(nlohmann::json{{"points_2d", nlohmann::json::array()}}), "");
    const auto c = evaluation::make_synthetic_case(test::shared_basis(), 1, 0.0, evaluation::NoiseModel{});
    nlohmann::json j = landmarks_to_json(c.landmarks);
    j["points_3d"][0] = {1.0, 2.0};
    EXPECT_NE(message_of(j).find("landmark 1 "), std::string::npos) << message_of(j);
    EXPECT_THROW(load_landmarks(temp_path("missing.json")), FormatError);
}

TEST(Obj, SingleTriangle)
{
    Mesh mesh;
    mesh.vertices = Eigen::Matrix3d::Identity();
    mesh.triangles = {{0, 1, 2}};
    const std::string text = to_obj(mesh);
    EXPECT_EQ(text, "v 1.000000 0.000000 0.000000\nv 0.000000 1.000000 0.000000\nv 0.000000 0.000000 1.000000\n"
                    "f 1 2 3\n");
    EXPECT_EQ(count_lines_starting_with(text, "v "), 3);
    EXPECT_EQ(count_lines_starting_with(text, "f "), 1);
}

TEST(Obj, RoundTripPreservesVertices)
{
    const auto& basis = test::shared_basis();
    std::mt19937_64 rng(71);
    const Mesh mesh = model::synthesize(basis, test::random_params(basis, rng));
    const auto path = temp_path("mesh.obj");
    export_obj(mesh, path);
    const Mesh back = load_obj(path);
    EXPECT_LE((back.vertices - mesh.vertices).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_EQ(back.triangles, mesh.triangles);
    EXPECT_EQ(to_obj(back), read_text(path));
    std::filesystem::remove(path);
}

TEST(Obj, ReaderAcceptsSlashFaces)
{
    std::istringstream in("# comment\nv 0 0 0\nv 1 0 0\nvt 0 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2//1 3\n");
    const Mesh mesh = parse_obj(in);
    EXPECT_EQ(mesh.num_vertices(), 3);
    ASSERT_EQ(mesh.triangles.size(), 1u);
    EXPECT_EQ(mesh.triangles[0], (Triangle{0, 1, 2}));
    std::istringstream bad("v 0 0 0\nf 1 2 3\n");
    EXPECT_THROW(parse_obj(bad), FormatError);
}

TEST(Obj, EmptyMeshIsRejected)
{
    EXPECT_THROW(to_obj(Mesh{}), InvalidInput);
    EXPECT_THROW(export_obj(Mesh{}, temp_path("empty.obj")), InvalidInput);
}

TEST(Obj, UnwritablePath)
{
    Mesh mesh;
    mesh.vertices = Eigen::Matrix3d::Identity();
    EXPECT_THROW(export_obj(mesh, temp_path("no_such_dir") / "x.obj"), FormatError);
}

TEST(ReportFile, RoundTripIsExact)
{
    const auto& basis = test::shared_basis();
    const auto c = evaluation::make_synthetic_case(basis, 2, 55 * deg, evaluation::NoiseModel{});
    const fitting::FitReport report = fitting::fit(basis, c.landmarks);
    const auto path = temp_path("report.json");
    save_report(report, path);
    const fitting::FitReport back = load_report(path);
    EXPECT_EQ(back.params.alpha, report.params.alpha);
    EXPECT_EQ(back.params.beta, report.params.beta);
    EXPECT_EQ(back.pose.angles.yaw, report.pose.angles.yaw);
    EXPECT_EQ(back.pose.depth_offset, report.pose.depth_offset);
    ASSERT_EQ(back.per_iteration.size(), report.per_iteration.size());
    EXPECT_EQ(back.per_iteration[1].inner_energies, report.per_iteration[1].inner_energies);
    EXPECT_EQ(back.per_iteration[0].hidden, report.per_iteration[0].hidden);
    EXPECT_EQ(back.residuals_3d, report.residuals_3d);
    const std::string first = read_text(path);
    save_report(back, path);
    EXPECT_EQ(read_text(path), first);

    const auto params_path = temp_path("params.json");
    save_params(report.params, params_path);
    EXPECT_EQ(load_params(params_path).alpha, report.params.alpha);
    std::filesystem::remove(path);
    std::filesystem::remove(params_path);
}

TEST(RunConfig, Validation)
{
    RunConfig cfg;
    EXPECT_THROW(validate(cfg), InvalidInput);
    cfg.model_path = "model.mfit";
    cfg.landmark_paths = {"a.json"};
    cfg.output_dir = "out";
    EXPECT_NO_THROW(validate(cfg));
    cfg.landmark_paths = {""};
    EXPECT_THROW(validate(cfg), InvalidInput);
    cfg.landmark_paths = {"a.json"};
    cfg.weights.w = 2.0;
    EXPECT_THROW(validate(cfg), InvalidInput);
}
