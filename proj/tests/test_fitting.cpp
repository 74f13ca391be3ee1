/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: tests/test_fitting.cpp
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
#include "mfit/evaluation/metrics.hpp"
#include "mfit/fitting/energy.hpp"
#include "mfit/fitting/fit.hpp"
#include "mfit/fitting/gauss_newton.hpp"
#include "mfit/fitting/weights.hpp"

#include "gtest/gtest.h"

#include <cmath>
#include <random>
#include <vector>

using namespace mfit;
using namespace mfit::fitting;
using test::deg;

namespace {

struct WeightCase
{
    double yaw_deg;
    double lambda_2d;
    double lambda_3d;
};

// r = yaw / 90 degrees; below 0.5 (1 - r, r / 2), from 0.5 on ((1 - r) / 2, r).
const WeightCase weight_table[] = {
    {0.0, 1.0, 0.0},
    {30.0, 2.0 / 3.0, 1.0 / 6.0},
    {44.9, 1.0 - 44.9 / 90.0, 44.9 / 180.0},
    {45.0, 0.25, 0.5},
    {60.0, 1.0 / 6.0, 2.0 / 3.0},
    {90.0, 0.0, 1.0},
};

camera::Pose random_pose(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    camera::Pose pose;
    pose.scale = 2.0 + 0.2 * u(rng);
    pose.angles = {0.3 * u(rng), 1.2 * u(rng), 0.3 * u(rng)};
    pose.translation = {256.0 + 30 * u(rng), 256.0 + 30 * u(rng)};
    pose.depth_offset = {5 * u(rng), 5 * u(rng), 20 * u(rng)};
    return pose;
}

double landmark_rmse(const model::ModelBasis& basis, const model::FaceParams& a, const model::FaceParams& b)
{
    const Eigen::Matrix3Xd d = model::landmarks_of(basis, a) - model::landmarks_of(basis, b);
    return std::sqrt(d.colwise().squaredNorm().mean());
}

double surface_error(const model::ModelBasis& basis, const model::FaceParams& fitted, const model::FaceParams& truth)
{
    return evaluation::score_reconstruction(model::synthesize(basis, fitted).vertices,
                                            model::synthesize(basis, truth).vertices, basis.nose_tip_index)
        .rmse_mm;
}

// Exponential curve a * exp(b * t) fitted to samples.
struct CurveProblem
{
    Eigen::VectorXd t, y;

    Eigen::VectorXd residual(const Eigen::VectorXd& x) const
    {
        return (x(0) * (x(1) * t.array()).exp() - y.array()).matrix();
    }
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const
    {
        Eigen::MatrixXd j(t.size(), 2);
        j.col(0) = (x(1) * t.array()).exp().matrix();
        j.col(1) = (x(0) * t.array() * (x(1) * t.array()).exp()).matrix();
        return j;
    }
};

} // namespace

TEST(AdaptiveWeights, TableValues)
{
    for (const auto& c : weight_table)
    {
        for (double sign : {1.0, -1.0})
        {
            const Weights w = adaptive_weights(sign * c.yaw_deg * deg);
            EXPECT_NEAR(w.lambda_2d, c.lambda_2d, 1e-12) << c.yaw_deg;
            EXPECT_NEAR(w.lambda_3d, c.lambda_3d, 1e-12) << c.yaw_deg;
        }
    }
}

TEST(AdaptiveWeights, JustBelowTheBoundary)
{
    const Weights w = adaptive_weights(0.499 * std::numbers::pi / 2);
    EXPECT_NEAR(w.lambda_2d, 0.501, 1e-12);
    EXPECT_NEAR(w.lambda_3d, 0.2495, 1e-12);
}

TEST(AdaptiveWeights, BoundaryBelongsToTheLargePoseBranch)
{
    WeightConfig cfg;
    cfg.epsilon = 0.5;
    const Weights w = adaptive_weights(std::numbers::pi / 4, cfg);
    EXPECT_EQ(w.lambda_3d, 0.5);
    EXPECT_EQ(w.lambda_2d, 0.25);
}

TEST(AdaptiveWeights, RangeAndMonotonicity)
{
    const WeightConfig cfg;
    double previous_3d = -1.0;
    bool previous_large = false;
    for (int k = 0; k <= 2000; ++k)
    {
        const double yaw = k * (std::numbers::pi / 2) / 2000.0;
        const Weights w = adaptive_weights(yaw, cfg);
        EXPECT_GE(w.lambda_2d, 0.0);
        EXPECT_LE(w.lambda_2d, 1.0);
        EXPECT_GE(w.lambda_3d, 0.0);
        EXPECT_LE(w.lambda_3d, 1.0);
        const bool large = 2.0 * yaw / std::numbers::pi >= cfg.epsilon;
        if (large == previous_large)
            EXPECT_GE(w.lambda_3d, previous_3d) << k;
        previous_3d = w.lambda_3d;
        previous_large = large;
        const Weights mirrored = adaptive_weights(-yaw, cfg);
        EXPECT_EQ(mirrored.lambda_2d, w.lambda_2d);
        EXPECT_EQ(mirrored.lambda_3d, w.lambda_3d);
    }
    const Weights beyond = adaptive_weights(2.5, cfg);
    EXPECT_EQ(beyond.lambda_3d, 1.0);
    EXPECT_EQ(beyond.lambda_2d, 0.0);
}

TEST(AdaptiveWeights, RejectsInvalidInput)
{
    EXPECT_THROW(adaptive_weights(std::numeric_limits<double>::quiet_NaN()), InvalidInput);
    WeightConfig cfg;
    cfg.epsilon = 0.0;
    EXPECT_THROW(validate(cfg), InvalidInput);
    cfg = {};
    cfg.iters = 0;
    EXPECT_THROW(validate(cfg), InvalidInput);
    cfg = {};
    cfg.lambda_beta = -1.0;
    EXPECT_THROW(validate(cfg), InvalidInput);
}

TEST(Energy2d, SelfConsistentAndShifted)
{
    const auto& basis = test::shared_basis();
    std::mt19937_64 rng(51);
    const model::FaceParams p = test::random_params(basis, rng);
    const camera::Pose pose = random_pose(rng);
    camera::LandmarkSet lm;
    lm.points_2d = camera::project(pose, model::landmarks_of(basis, p));
    lm.points_3d = Eigen::Matrix3Xd::Zero(3, num_landmarks);
    EXPECT_LT(energy_2d(basis, p, pose, lm), 1e-18);
    lm.points_2d.row(0).array() += 1.0;
    EXPECT_NEAR(energy_2d(basis, p, pose, lm), 68.0, 1e-9);
}

TEST(Energy2d, MatchesPerLandmarkLoop)
{
    const auto& basis = test::shared_basis();
    std::mt19937_64 rng(52);
    std::normal_distribution<double> g(0.0, 5.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        const model::FaceParams p = test::random_params(basis, rng);
        const camera::Pose pose = random_pose(rng);
        camera::LandmarkSet lm;
        lm.points_2d = Eigen::Matrix2Xd(2, num_landmarks);
        for (Eigen::Index i = 0; i < lm.points_2d.size(); ++i)
            lm.points_2d(i) = 256.0 + 40.0 * g(rng);
        lm.points_3d = Eigen::Matrix3Xd::Zero(3, num_landmarks);

        const Eigen::Matrix3d r = camera::rotation_from_euler(pose.angles);
        const Mesh mesh = model::synthesize(basis, p);
        double expected = 0.0;
        for (int i = 0; i < num_landmarks; ++i)
        {
            const Eigen::Vector3d x = mesh.vertices.col(basis.landmark_indices[i]);
            for (int c = 0; c < 2; ++c)
            {
                const double projected = pose.scale * (r(c, 0) * x(0) + r(c, 1) * x(1) + r(c, 2) * x(2)) +
                                         pose.translation(c);
                expected += (projected - lm.points_2d(c, i)) * (projected - lm.points_2d(c, i));
            }
        }
        EXPECT_NEAR(energy_2d(basis, p, pose, lm), expected, 1e-9 * expected);
    }
}

TEST(Energy3d, SelfConsistentAndShifted)
{
    const auto& basis = test::shared_basis();
    std::mt19937_64 rng(53);
    const model::FaceParams p = test::random_params(basis, rng);
    const camera::Pose pose = random_pose(rng);
    camera::LandmarkSet lm;
    lm.points_2d = Eigen::Matrix2Xd::Zero(2, num_landmarks);
    lm.points_3d = camera::to_camera_frame(pose, model::landmarks_of(basis, p)).colwise() - pose.depth_offset;
    EXPECT_LT(energy_3d(basis, p, pose, lm), 1e-18);
    lm.points_3d.row(2).array() += 1.0;
    EXPECT_NEAR(energy_3d(basis, p, pose, lm), 68.0, 1e-9);
}

TEST(Energy3d, MatchesPerLandmarkLoop)
{
    const auto& basis = test::shared_basis();
    std::mt19937_64 rng(54);
    std::normal_distribution<double> g(0.0, 40.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        const model::FaceParams p = test::random_params(basis, rng);
        const camera::Pose pose = random_pose(rng);
        camera::LandmarkSet lm;
        lm.points_2d = Eigen::Matrix2Xd::Zero(2, num_landmarks);
        lm.points_3d = Eigen::Matrix3Xd(3, num_landmarks);
        for (Eigen::Index i = 0; i < lm.points_3d.size(); ++i)
            lm.points_3d(i) = g(rng);

        const Eigen::Matrix3d r = camera::rotation_from_euler(pose.angles);
        const Mesh mesh = model::synthesize(basis, p);
        double expected = 0.0;
        for (int i = 0; i < num_landmarks; ++i)
        {
            const Eigen::Vector3d x = mesh.vertices.col(basis.landmark_indices[i]);
            for (int c = 0; c < 3; ++c)
            {
                const double model = pose.scale * (r(c, 0) * x(0) + r(c, 1) * x(1) + r(c, 2) * x(2));
                const double d = model - (lm.points_3d(c, i) + pose.depth_offset(c));
                expected += d * d;
            }
        }
        EXPECT_NEAR(energy_3d(basis, p, pose, lm), expected, 1e-9 * expected);
    }
}

TEST(PriorEnergy, UnitAndZeroCases)
{
    const auto& basis = test::shared_basis();
    WeightConfig cfg;
    cfg.lambda_alpha = 1.0;
    model::FaceParams p = model::FaceParams::zero(basis);
    EXPECT_EQ(prior_energy(p, {0.4, 0.6}, basis, cfg), 0.0);
    p.alpha(0) = std::sqrt(basis.shape_eigenvalues(0));
    EXPECT_NEAR(prior_energy(p, {0.4, 0.6}, basis, cfg), 1.0, 1e-15);
}

TEST(PriorEnergy, MatchesBruteForceSum)
{
    const auto& basis = test::shared_basis();
    std::mt19937_64 rng(55);
    WeightConfig cfg;
    cfg.lambda_alpha = 0.3;
    cfg.lambda_beta = 0.7;
    const Weights w{0.2, 0.5};
    for (int trial = 0; trial < 10; ++trial)
    {
        const model::FaceParams p = test::random_params(basis, rng, 2.0);
        double shape = 0.0, expr = 0.0;
        for (int k = 0; k < basis.num_shape(); ++k)
            shape += p.alpha(k) * p.alpha(k) / basis.shape_eigenvalues(k);
        for (int k = 0; k < basis.num_expr(); ++k)
            expr += p.beta(k) * p.beta(k) / basis.expr_eigenvalues(k);
        const double expected = 0.3 * 0.7 * shape + 0.7 * 0.7 * expr;
        EXPECT_NEAR(prior_energy(p, w, basis, cfg), expected, 1e-12 * expected);
    }
}

TEST(JointResidual, SquaredNormIsTheWeightedEnergy)
{
    const auto& basis = test::shared_basis();
    const model::LandmarkBasis lb(basis);
    std::mt19937_64 rng(56);
    const auto c = evaluation::make_synthetic_case(basis, 56, 50 * deg, evaluation::NoiseModel{});
    const model::FaceParams p = test::random_params(basis, rng);
    const camera::Pose pose = random_pose(rng);
    const Weights w{0.3, 0.6};
    const WeightConfig cfg;
    const JointResidual problem(lb, basis.shape_eigenvalues, basis.expr_eigenvalues, pose, c.landmarks.points_2d,
                                c.landmarks.points_3d, w, cfg);
    const Eigen::VectorXd x = problem.pack(p, pose);
    const double expected = w.lambda_2d * energy_2d(basis, p, pose, c.landmarks) +
                            w.lambda_3d * energy_3d(basis, p, pose, c.landmarks) + prior_energy(p, w, basis, cfg);
    EXPECT_NEAR(problem.residual(x).squaredNorm(), expected, 1e-10 * expected);
    EXPECT_NEAR(problem.energies(x).e_fit, expected, 1e-10 * expected);
}

TEST(JointResidual, JacobianMatchesCentralDifferences)
{
    const auto& basis = test::shared_basis();
    const model::LandmarkBasis lb(basis);
    std::mt19937_64 rng(57);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int state = 0; state < 20; ++state)
    {
        const auto c = evaluation::make_synthetic_case(basis, 570 + state, (u(rng) - 0.5) * 160 * deg,
                                                       evaluation::NoiseModel{});
        const camera::Pose pose = random_pose(rng);
        const Weights w{u(rng), u(rng)};
        const bool free_pose = state % 4 != 3;
        const JointResidual problem(lb, basis.shape_eigenvalues, basis.expr_eigenvalues, pose, c.landmarks.points_2d,
                                    c.landmarks.points_3d, w, WeightConfig{}, free_pose);
        const Eigen::VectorXd x = problem.pack(test::random_params(basis, rng), pose);
        const Eigen::MatrixXd analytic = problem.jacobian(x);
        ASSERT_EQ(analytic.cols(), x.size());
        for (Eigen::Index k = 0; k < x.size(); ++k)
        {
            const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
            Eigen::VectorXd plus = x, minus = x;
            plus(k) += h;
            minus(k) -= h;
            const Eigen::VectorXd numeric = (problem.residual(plus) - problem.residual(minus)) / (2.0 * h);
            const double scale = std::max(analytic.col(k).norm(), 1e-6);
            EXPECT_LE((numeric - analytic.col(k)).norm(), 1e-4 * scale) << "state " << state << " column " << k;
        }
    }
}

TEST(GaussNewton, RecoversAnExponentialCurve)
{
    CurveProblem problem;
    problem.t = Eigen::VectorXd::LinSpaced(30, 0.0, 2.0);
    problem.y = (1.7 * (-0.8 * problem.t.array()).exp()).matrix();
    const GaussNewtonSummary s = minimize_gauss_newton(problem, Eigen::Vector2d(1.0, 0.0));
    EXPECT_TRUE(s.converged);
    EXPECT_NEAR(s.x(0), 1.7, 1e-6);
    EXPECT_NEAR(s.x(1), -0.8, 1e-6);
    for (std::size_t k = 1; k < s.energies.size(); ++k)
        EXPECT_LE(s.energies[k], s.energies[k - 1]);
}

TEST(Fit, NoiselessRecoveryAtThirtyDegrees)
{
    const auto& basis = test::shared_basis();
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const auto c = evaluation::make_synthetic_case(basis, seed, 30 * deg, evaluation::NoiseModel::none());
        const FitReport report = fit(basis, c.landmarks);
        EXPECT_LT(landmark_rmse(basis, report.params, c.truth), 0.1) << "seed " << seed;
        EXPECT_EQ(report.per_iteration.size(), 4u);
    }
}

TEST(Fit, MeanFaceStaysPut)
{
    const auto& basis = test::shared_basis();
    const auto c = evaluation::make_synthetic_case(basis, 8, 40 * deg, evaluation::NoiseModel::none(), {},
                                                   evaluation::Identity::mean_face);
    const FitReport report = fit(basis, c.landmarks);
    EXPECT_LE(report.params.alpha.norm(), 1e-3);
    EXPECT_LE(report.params.beta.norm(), 1e-3);
}

TEST(Fit, EnergyNeverIncreasesWithinARound)
{
    const auto& basis = test::shared_basis();
    for (std::uint64_t seed = 0; seed < 6; ++seed)
    {
        const auto c = evaluation::make_synthetic_case(basis, seed, (20.0 + 12 * seed) * deg, evaluation::NoiseModel{});
        for (Variant v : all_variants)
        {
            const FitReport report = fit_variant(basis, c.landmarks, WeightConfig{}, v);
            for (const auto& round : report.per_iteration)
            {
                ASSERT_FALSE(round.inner_energies.empty());
                for (std::size_t k = 1; k < round.inner_energies.size(); ++k)
                    EXPECT_LE(round.inner_energies[k], round.inner_energies[k - 1]);
                EXPECT_TRUE(std::isfinite(round.e_fit));
                EXPECT_NEAR(round.e_fit, round.inner_energies.back(), 1e-9 * std::max(1.0, round.e_fit));
            }
        }
    }
}

TEST(Fit, RecordsTheWeightScheduleOfEachRound)
{
    const auto& basis = test::shared_basis();
    const auto c = evaluation::make_synthetic_case(basis, 4, 70 * deg, evaluation::NoiseModel{});
    const FitReport report = fit(basis, c.landmarks);
    for (const auto& round : report.per_iteration)
    {
        const Weights w = adaptive_weights(round.yaw);
        EXPECT_EQ(round.lambda_2d, w.lambda_2d);
        EXPECT_EQ(round.lambda_3d, w.lambda_3d);
        EXPECT_GT(round.lambda_3d, 0.5);
        EXPECT_EQ(round.hidden, layout::Side::right);
    }
}

TEST(Fit, Deterministic)
{
    const auto& basis = test::shared_basis();
    const auto c = evaluation::make_synthetic_case(basis, 77, -65 * deg, evaluation::NoiseModel{});
    const FitReport a = fit(basis, c.landmarks);
    const FitReport b = fit(basis, c.landmarks);
    EXPECT_EQ(a.params.alpha, b.params.alpha);
    EXPECT_EQ(a.params.beta, b.params.beta);
    EXPECT_EQ(a.pose.angles.yaw, b.pose.angles.yaw);
}

TEST(FitVariant, TwoDMatchesFullWhenFrontal)
{
    const auto& basis = test::shared_basis();
    const auto c = evaluation::make_synthetic_case(basis, 12, 0.0, evaluation::NoiseModel::none());
    const FitReport full = fit(basis, c.landmarks);
    const FitReport two_d = fit_variant(basis, c.landmarks, WeightConfig{}, Variant::two_d);
    EXPECT_LT(landmark_rmse(basis, full.params, two_d.params), 1e-2);
    EXPECT_NEAR(full.pose.yaw(), c.pose.yaw(), 1e-3);
    EXPECT_NEAR(two_d.pose.yaw(), c.pose.yaw(), 1e-3);
}

TEST(FitVariant, TwoDOnlyImprovesOnTheMeanFace)
{
    const auto& basis = test::shared_basis();
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const auto c = evaluation::make_synthetic_case(basis, seed, 10 * deg, evaluation::NoiseModel{});
        const FitReport report = fit_variant(basis, c.landmarks, WeightConfig{}, Variant::two_d);
        const double initial = energy_2d(model::landmarks_of(basis, model::FaceParams::zero(basis)),
                                         report.coarse_pose, c.landmarks.points_2d);
        EXPECT_LE(report.per_iteration.back().e_2d, initial);
        EXPECT_EQ(report.per_iteration.back().lambda_3d, 0.0);
    }
}

TEST(FitVariant, ThreeDBeatsTwoDAtEightyDegrees)
{
    const auto& basis = test::shared_basis();
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const auto c = evaluation::make_synthetic_case(basis, seed, 80 * deg, evaluation::NoiseModel{});
        const double two_d = surface_error(basis, fit_variant(basis, c.landmarks, {}, Variant::two_d).params, c.truth);
        const double three_d =
            surface_error(basis, fit_variant(basis, c.landmarks, {}, Variant::three_d).params, c.truth);
        EXPECT_LT(three_d, two_d) << "seed " << seed;
    }
}

TEST(FitVariant, FullBeatsTwoDWithOccludedSilhouette)
{
    const auto& basis = test::shared_basis();
    evaluation::NoiseModel noise = evaluation::NoiseModel::none();
    noise.silhouette_corruption = 30.0;
    int wins = 0;
    for (int i = 0; i < 50; ++i)
    {
        const auto c = evaluation::make_synthetic_case(basis, evaluation::case_seed(75, i), 75 * deg, noise);
        const double full = surface_error(basis, fit(basis, c.landmarks).params, c.truth);
        const double two_d = surface_error(basis, fit_variant(basis, c.landmarks, {}, Variant::two_d).params, c.truth);
        wins += full < two_d;
    }
    EXPECT_GE(wins, 45);
}

TEST(FitVariant, WeightSwitches)
{
    const auto& basis = test::shared_basis();
    const auto c = evaluation::make_synthetic_case(basis, 5, 70 * deg, evaluation::NoiseModel{});
    const auto round = [&](Variant v) { return fit_variant(basis, c.landmarks, {}, v).per_iteration.front(); };
    EXPECT_EQ(round(Variant::two_d).lambda_2d, 1.0);
    EXPECT_EQ(round(Variant::two_d).lambda_3d, 0.0);
    EXPECT_EQ(round(Variant::three_d).lambda_2d, 0.0);
    EXPECT_EQ(round(Variant::three_d).lambda_3d, 1.0);
    EXPECT_EQ(round(Variant::joint).lambda_2d, 0.5);
    EXPECT_EQ(round(Variant::joint).lambda_3d, 0.5);
    const auto weighted = round(Variant::joint_weighted);
    const Weights expected = adaptive_weights(weighted.yaw);
    EXPECT_EQ(weighted.lambda_2d, expected.lambda_2d);
    EXPECT_EQ(weighted.hidden, layout::Side::none);
    EXPECT_EQ(round(Variant::full).hidden, layout::Side::right);
}

TEST(FitVariant, NamesRoundTrip)
{
    for (Variant v : all_variants)
        EXPECT_EQ(parse_variant(to_string(v)), v);
    EXPECT_EQ(parse_variant("full"), Variant::full);
    EXPECT_FALSE(parse_variant("4D").has_value());
}
