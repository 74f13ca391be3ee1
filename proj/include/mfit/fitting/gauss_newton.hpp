/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/fitting/gauss_newton.hpp
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

#ifndef MFIT_FITTING_GAUSS_NEWTON_HPP
#define MFIT_FITTING_GAUSS_NEWTON_HPP

#include "Eigen/Core"
#include "Eigen/Cholesky"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <vector>

namespace mfit {
namespace fitting {

template <typename P>
concept LeastSquaresProblem = requires(const P& p, const Eigen::VectorXd& x) {
    { p.residual(x) } -> std::convertible_to<Eigen::VectorXd>;
    { p.jacobian(x) } -> std::convertible_to<Eigen::MatrixXd>;
};

struct GaussNewtonOptions
{
    int max_steps = 50;
    double relative_tolerance = 1e-8;
    double initial_damping = 1e-6;
    double damping_factor = 10.0;
    int max_damping_retries = 10;
};

struct GaussNewtonSummary
{
    Eigen::VectorXd x;
    std::vector<double> energies; ///< initial energy followed by every accepted step
    int steps = 0;
    bool converged = false;
};

/**
 * Damped Gauss-Newton (Levenberg-Marquardt style diagonal damping) on
 * ||r(x)||^2. A step is accepted only if it lowers the energy; otherwise the
 * damping grows by damping_factor and the step is retried. The solve stops
 * when the relative energy change, or the linearised decrease still on offer,
 * drops below relative_tolerance. Running out of retries or steps reports
 * converged = false together with the best point found.
 */
template <LeastSquaresProblem Problem>
GaussNewtonSummary minimize_gauss_newton(const Problem& problem, Eigen::VectorXd x,
                                         const GaussNewtonOptions& options = {})
{
    constexpr double tiny = std::numeric_limits<double>::min();
    GaussNewtonSummary summary;
    Eigen::VectorXd r = problem.residual(x);
    double energy = r.squaredNorm();
    summary.energies.push_back(energy);
    double damping = options.initial_damping;

    for (; summary.steps < options.max_steps; ++summary.steps)
    {
        const Eigen::MatrixXd j = problem.jacobian(x);
        const Eigen::MatrixXd normal = j.transpose() * j;
        const Eigen::VectorXd gradient = j.transpose() * r;
        const double floor = 1e-12 * std::max(normal.diagonal().maxCoeff(), tiny);

        bool accepted = false;
        for (int retry = 0; retry <= options.max_damping_retries; ++retry)
        {
            Eigen::MatrixXd damped = normal;
            damped.diagonal() += damping * normal.diagonal().cwiseMax(floor);
            const Eigen::VectorXd delta = -damped.ldlt().solve(gradient);
            const double predicted = energy - (r + j * delta).squaredNorm();
            if (predicted <= options.relative_tolerance * std::max(energy, tiny))
            {
                summary.converged = true;
                summary.x = std::move(x);
                return summary;
            }
            const Eigen::VectorXd candidate = x + delta;
            Eigen::VectorXd candidate_r = problem.residual(candidate);
            const double candidate_energy = candidate_r.squaredNorm();
            if (std::isfinite(candidate_energy) && candidate_energy < energy)
            {
                const double change = (energy - candidate_energy) / std::max(energy, tiny);
                x = candidate;
                r = std::move(candidate_r);
                energy = candidate_energy;
                summary.energies.push_back(energy);
                damping = std::max(damping / options.damping_factor, 1e-15);
                accepted = true;
                if (change < options.relative_tolerance)
                {
                    ++summary.steps;
                    summary.converged = true;
                    summary.x = std::move(x);
                    return summary;
                }
                break;
            }
            damping *= options.damping_factor;
        }
        if (!accepted)
        {
            summary.converged = false;
            summary.x = std::move(x);
            return summary;
        }
    }
    summary.converged = false;
    summary.x = std::move(x);
    return summary;
}

} /* namespace fitting */
} /* namespace mfit */

#endif /* MFIT_FITTING_GAUSS_NEWTON_HPP */
