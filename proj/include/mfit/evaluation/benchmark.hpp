/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/evaluation/benchmark.hpp
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

#ifndef MFIT_EVALUATION_BENCHMARK_HPP
#define MFIT_EVALUATION_BENCHMARK_HPP

#include "mfit/camera/pose.hpp"
#include "mfit/camera/pose_estimation.hpp"
#include "mfit/core/landmark_layout.hpp"
#include "mfit/core/types.hpp"
#include "mfit/evaluation/metrics.hpp"
#include "mfit/fitting/fit.hpp"
#include "mfit/model/model_basis.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace mfit {
namespace evaluation {

/**
 * Synthetic detector noise. Isotropic Gaussian pixel noise on every 2D
 * landmark and on the image-plane part of every 3D landmark, extra Gaussian
 * noise on the 3D depth, and uniform corruption of the hidden 2D silhouette.
 */
struct NoiseModel
{
    double sigma_2d = 1.0;
    double sigma_3d_xy = 1.0;
    double sigma_depth = 2.0;
    double silhouette_corruption = 30.0; ///< half-width of the uniform corruption, pixels

    static NoiseModel none() { return {0.0, 0.0, 0.0, 0.0}; }
};

/// Where the face of a synthetic case comes from.
enum class Identity { sampled, mean_face };

struct SyntheticCase
{
    std::uint64_t seed = 0;
    model::FaceParams truth;
    camera::Pose pose;
    camera::LandmarkSet landmarks;
};

struct PoseRanges
{
    double min_scale = 1.8; ///< pixels per mm
    double max_scale = 2.2;
    double max_pitch = 10.0 * std::numbers::pi / 180.0;
    double max_roll = 10.0 * std::numbers::pi / 180.0;
    Eigen::Vector2d image_center{256.0, 256.0};
    double max_offset = 20.0; ///< pixels
};

/**
 * Draws a face (alpha, beta from their prior), a pose with the given yaw and
 * the detections that a landmark detector would report for it.
 *
 * The 3D landmarks carry image x, y and the depth relative to the landmark
 * centroid. The silhouette hidden at the true yaw (visibility rule) gets the
 * uniform corruption. Random numbers are always drawn in the same order, so a
 * seed gives the same pose and noise for any noise model or identity choice.
 * Identity::mean_face discards the drawn coefficients.
 */
inline SyntheticCase make_synthetic_case(const model::ModelBasis& basis, std::uint64_t seed, double yaw,
                                         const NoiseModel& noise, const PoseRanges& ranges = {},
                                         Identity identity = Identity::sampled)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    SyntheticCase c;
    c.seed = seed;
    c.truth = model::FaceParams::zero(basis);
    for (Eigen::Index k = 0; k < c.truth.alpha.size(); ++k)
        c.truth.alpha(k) = std::sqrt(basis.shape_eigenvalues(k)) * gauss(rng);
    for (Eigen::Index k = 0; k < c.truth.beta.size(); ++k)
        c.truth.beta(k) = std::sqrt(basis.expr_eigenvalues(k)) * gauss(rng);
    if (identity == Identity::mean_face)
        c.truth = model::FaceParams::zero(basis);

    c.pose.scale = uniform(ranges.min_scale, ranges.max_scale);
    c.pose.angles.pitch = uniform(-ranges.max_pitch, ranges.max_pitch);
    c.pose.angles.yaw = yaw;
    c.pose.angles.roll = uniform(-ranges.max_roll, ranges.max_roll);
    c.pose.translation = ranges.image_center + Eigen::Vector2d(uniform(-ranges.max_offset, ranges.max_offset),
                                                               uniform(-ranges.max_offset, ranges.max_offset));

    const Eigen::Matrix3Xd camera = camera::to_camera_frame(c.pose, model::landmarks_of(basis, c.truth));
    const double mean_depth = camera.row(2).mean();
    c.pose.depth_offset = Eigen::Vector3d(-c.pose.translation.x(), -c.pose.translation.y(), mean_depth);

    const layout::Side hidden = camera::hidden_silhouette(yaw);
    auto& lm = c.landmarks;
    lm.image_width = 2.0 * ranges.image_center.x();
    lm.image_height = 2.0 * ranges.image_center.y();
    for (int i = 0; i < num_landmarks; ++i)
    {
        const Eigen::Vector2d image = camera.col(i).head<2>() + c.pose.translation;
        const double n2x = gauss(rng), n2y = gauss(rng);
        const double n3x = gauss(rng), n3y = gauss(rng), n3z = gauss(rng);
        const double cx = uniform(-1.0, 1.0), cy = uniform(-1.0, 1.0);

        lm.points_2d.col(i) = image + noise.sigma_2d * Eigen::Vector2d(n2x, n2y);
        if (layout::is_silhouette(i, hidden))
            lm.points_2d.col(i) += noise.silhouette_corruption * Eigen::Vector2d(cx, cy);
        lm.points_3d.col(i) = Eigen::Vector3d(image.x() + noise.sigma_3d_xy * n3x, image.y() + noise.sigma_3d_xy * n3y,
                                              camera(2, i) - mean_depth + noise.sigma_depth * n3z);
    }
    return c;
}

/// Seed of case \p index of a benchmark run, mixed through std::seed_seq.
inline std::uint64_t case_seed(std::uint64_t run_seed, int index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(run_seed & 0xffffffffu), static_cast<std::uint32_t>(run_seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

struct BenchmarkConfig
{
    std::uint64_t seed = 0;
    int n_cases = 50;
    double yaw_min_deg = 60.0;
    double yaw_max_deg = 80.0;
    bool random_yaw_sign = true; ///< mirror half of the cases to the other side (left/right views)
    NoiseModel noise;
    PoseRanges poses;
    fitting::WeightConfig weights;
    std::vector<fitting::Variant> variants{fitting::all_variants.begin(), fitting::all_variants.end()};
    unsigned threads = 0; ///< 0 picks std::thread::hardware_concurrency()
};

struct CaseRecord
{
    int case_index = 0;
    std::uint64_t seed = 0;
    double yaw_deg = 0.0;
    fitting::Variant variant = fitting::Variant::full;
    double rmse_mm = 0.0;
    int iters = 0; ///< accepted inner Gauss-Newton steps over all rounds
    bool converged = false;
};

struct VariantSummary
{
    fitting::Variant variant = fitting::Variant::full;
    double mean_rmse_mm = 0.0;
    int cases = 0;
};

struct BenchmarkResult
{
    std::vector<CaseRecord> records; ///< ordered by case, then by variant
    std::vector<VariantSummary> summary;

    double mean_rmse(fitting::Variant variant) const
    {
        for (const auto& s : summary)
        {
            if (s.variant == variant)
                return s.mean_rmse_mm;
        }
        throw InvalidInput(std::string("variant ") + fitting::to_string(variant) + " was not benchmarked");
    }
};

/// Fits \p landmarks with one variant and scores the result against the true face.
inline CaseRecord evaluate_variant(const model::ModelBasis& basis, const SyntheticCase& c,
                                   const Eigen::Matrix3Xd& truth_vertices, fitting::Variant variant,
                                   const fitting::WeightConfig& cfg)
{
    const fitting::FitReport report = fitting::fit_variant(basis, c.landmarks, cfg, variant);
    const Mesh reconstruction = model::synthesize(basis, report.params);
    CaseRecord record;
    record.seed = c.seed;
    record.yaw_deg = c.pose.yaw() * 180.0 / std::numbers::pi;
    record.variant = variant;
    record.rmse_mm = score_reconstruction(reconstruction.vertices, truth_vertices, basis.nose_tip_index).rmse_mm;
    record.iters = report.total_inner_steps();
    record.converged = report.converged;
    return record;
}

/**
 * Synthetic ablation benchmark: generates n_cases faces with yaw drawn
 * uniformly from [yaw_min_deg, yaw_max_deg] (mirrored at random if
 * random_yaw_sign), runs every requested variant on each and scores them.
 * Cases run in parallel with per-case seeds; results are merged in case order
 * so the output does not depend on the thread count.
 */
inline BenchmarkResult run_ablation_benchmark(const model::ModelBasis& basis, const BenchmarkConfig& config)
{
    if (config.n_cases < 1)
        throw InvalidInput("benchmark needs at least one case");
    if (config.yaw_min_deg > config.yaw_max_deg)
        throw InvalidInput("yaw_min must not exceed yaw_max");
    if (config.variants.empty())
        throw InvalidInput("benchmark needs at least one variant");
    model::validate(basis);
    fitting::validate(config.weights);

    const std::size_t per_case = config.variants.size();
    std::vector<CaseRecord> records(static_cast<std::size_t>(config.n_cases) * per_case);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.n_cases));

    const auto run_case = [&](int index) {
        try
        {
            const std::uint64_t seed = case_seed(config.seed, index);
            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            double yaw_deg = config.yaw_min_deg + (config.yaw_max_deg - config.yaw_min_deg) * unit(rng);
            if (config.random_yaw_sign && unit(rng) < 0.5)
                yaw_deg = -yaw_deg;
            const SyntheticCase c =
                make_synthetic_case(basis, seed, yaw_deg * std::numbers::pi / 180.0, config.noise, config.poses);
            const Mesh truth = model::synthesize(basis, c.truth);
            for (std::size_t v = 0; v < per_case; ++v)
            {
                CaseRecord record = evaluate_variant(basis, c, truth.vertices, config.variants[v], config.weights);
                record.case_index = index;
                records[static_cast<std::size_t>(index) * per_case + v] = record;
            }
        } catch (...)
        {
            errors[static_cast<std::size_t>(index)] = std::current_exception();
        }
    };

    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(config.n_cases));
    if (threads <= 1)
    {
        for (int i = 0; i < config.n_cases; ++i)
            run_case(i);
    } else
    {
        std::atomic<int> next{0};
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t)
        {
            workers.emplace_back([&] {
                for (int i = next++; i < config.n_cases; i = next++)
                    run_case(i);
            });
        }
    }
    for (const auto& error : errors)
    {
        if (error)
            std::rethrow_exception(error);
    }

    BenchmarkResult result;
    result.records = std::move(records);
    for (fitting::Variant variant : config.variants)
    {
        VariantSummary s;
        s.variant = variant;
        double sum = 0.0;
        for (const auto& r : result.records)
        {
            if (r.variant == variant)
            {
                sum += r.rmse_mm;
                ++s.cases;
            }
        }
        s.mean_rmse_mm = sum / s.cases;
        result.summary.push_back(s);
    }
    return result;
}

inline constexpr const char* benchmark_csv_header = "case,seed,yaw_deg,variant,rmse_mm,iters,converged";

/// Writes one row per (case, variant) under benchmark_csv_header.
inline void write_csv(const BenchmarkResult& result, std::ostream& out)
{
    out << benchmark_csv_header << '\n';
    char line[256];
    for (const auto& r : result.records)
    {
        std::snprintf(line, sizeof(line), "%d,%llu,%.6f,%s,%.9f,%d,%d\n", r.case_index,
                      static_cast<unsigned long long>(r.seed), r.yaw_deg, fitting::to_string(r.variant), r.rmse_mm,
                      r.iters, r.converged ? 1 : 0);
        out << line;
    }
}

} /* namespace evaluation */
} /* namespace mfit */

#endif /* MFIT_EVALUATION_BENCHMARK_HPP */
