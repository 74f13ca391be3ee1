/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/mfit.hpp
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

#ifndef MFIT_MFIT_HPP
#define MFIT_MFIT_HPP

#include "mfit/core/landmark_layout.hpp"
#include "mfit/core/types.hpp"
#include "mfit/model/model_basis.hpp"
#include "mfit/model/model_io.hpp"
#include "mfit/model/synthetic.hpp"
#include "mfit/camera/rotation.hpp"
#include "mfit/camera/pose.hpp"
#include "mfit/camera/pose_estimation.hpp"
#include "mfit/fitting/weights.hpp"
#include "mfit/fitting/energy.hpp"
#include "mfit/fitting/gauss_newton.hpp"
#include "mfit/fitting/fit.hpp"
#include "mfit/evaluation/kdtree.hpp"
#include "mfit/evaluation/icp.hpp"
#include "mfit/evaluation/metrics.hpp"
#include "mfit/evaluation/benchmark.hpp"
#include "mfit/io/landmarks_io.hpp"
#include "mfit/io/obj.hpp"
#include "mfit/io/report_io.hpp"
#include "mfit/io/run_config.hpp"

#endif /* MFIT_MFIT_HPP */
