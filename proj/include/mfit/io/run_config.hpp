/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/io/run_config.hpp
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

#ifndef MFIT_IO_RUN_CONFIG_HPP
#define MFIT_IO_RUN_CONFIG_HPP

#include "mfit/core/types.hpp"
#include "mfit/fitting/fit.hpp"
#include "mfit/fitting/weights.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mfit {
namespace io {

/// Everything a fitting run needs besides the data itself.
struct RunConfig
{
    std::filesystem::path model_path;
    std::vector<std::filesystem::path> landmark_paths;
    fitting::Variant variant = fitting::Variant::full;
    fitting::WeightConfig weights;
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;
};

inline void validate(const RunConfig& cfg)
{
    if (cfg.model_path.empty())
        throw InvalidInput("model path is empty");
    if (cfg.landmark_paths.empty())
        throw InvalidInput("no landmark file given");
    for (const auto& path : cfg.landmark_paths)
    {
        if (path.empty())
            throw InvalidInput("landmark path is empty");
    }
    if (cfg.output_dir.empty())
        throw InvalidInput("output directory is empty");
    fitting::validate(cfg.weights);
}

} /* namespace io */
} /* namespace mfit */

#endif /* MFIT_IO_RUN_CONFIG_HPP */
