/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: tools/mfit.cpp
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
#include "mfit/mfit.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

using namespace mfit;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_not_converged = 3;

constexpr double deg = std::numbers::pi / 180.0;

struct SynthOptions
{
    std::uint64_t seed = 0;
    std::string out;
    int vertices = 2000;
    int shape = 40;
    int expr = 10;
    std::string landmarks_out;
    std::string truth_obj;
    double yaw_deg = 0.0;
    std::uint64_t case_seed = 0;
    bool noiseless = false;
};

struct EvalOptions
{
    std::string recon;
    std::string truth;
    int nose_index = -1;
    double radius = evaluation::default_crop_radius_mm;
};

struct AblateOptions
{
    std::uint64_t seed = 0;
    int cases = 50;
    double yaw_min = 60.0;
    double yaw_max = 80.0;
    std::string out;
    std::string model;
    std::uint64_t model_seed = 7;
    unsigned threads = 0;
    bool noiseless = false;
};

void add_weight_options(CLI::App& cmd, fitting::WeightConfig& weights)
{
    cmd.add_option("--epsilon", weights.epsilon, "Large-pose boundary r = 2|yaw|/pi")->capture_default_str();
    cmd.add_option("--w", weights.w, "Damping of the weaker term")->capture_default_str();
    cmd.add_option("--lambda-alpha", weights.lambda_alpha, "Shape prior weight")->capture_default_str();
    cmd.add_option("--lambda-beta", weights.lambda_beta, "Expression prior weight")->capture_default_str();
    cmd.add_option("--iters", weights.iters, "Pose/shape rounds")->capture_default_str();
    cmd.add_option("--max-inner-steps", weights.max_inner_steps, "Gauss-Newton steps per round")
        ->capture_default_str();
}

int run_synth(const SynthOptions& o)
{
    const model::ModelBasis basis = model::generate_synthetic_basis(o.seed, o.vertices, o.shape, o.expr);
    model::save_model(basis, o.out);
    std::printf("model=%s vertices=%d shape=%d expr=%d\n", o.out.c_str(), basis.num_vertices(), basis.num_shape(),
                basis.num_expr());
    if (!o.landmarks_out.empty() || !o.truth_obj.empty())
    {
        const evaluation::NoiseModel noise = o.noiseless ? evaluation::NoiseModel::none() : evaluation::NoiseModel{};
        const evaluation::SyntheticCase c = evaluation::make_synthetic_case(basis, o.case_seed, o.yaw_deg * deg, noise);
        if (!o.landmarks_out.empty())
        {
            io::save_landmarks(c.landmarks, o.landmarks_out);
            std::printf("landmarks=%s yaw_deg=%.6f\n", o.landmarks_out.c_str(), o.yaw_deg);
        }
        if (!o.truth_obj.empty())
        {
            io::export_obj(model::synthesize(basis, c.truth), o.truth_obj);
            std::printf("truth=%s nose_index=%d\n", o.truth_obj.c_str(), basis.nose_tip_index);
        }
    }
    return exit_ok;
}

int run_fit(io::RunConfig cfg, const std::string& variant_name)
{
    const auto variant = fitting::parse_variant(variant_name);
    if (!variant)
    {
        std::cerr << "unknown variant '" << variant_name << "' (2D, 3D, 2D+3D, 2D+3D+W, 2D+3D+P+W or full)\n";
        return exit_usage;
    }
    cfg.variant = *variant;
    io::validate(cfg);

    const model::ModelBasis basis = model::load_model(cfg.model_path);
    std::filesystem::create_directories(cfg.output_dir);
    bool all_converged = true;
    for (const auto& path : cfg.landmark_paths)
    {
        const camera::LandmarkSet landmarks = io::load_landmarks(path);
        const fitting::FitReport report = fitting::fit_variant(basis, landmarks, cfg.weights, cfg.variant);
        const std::string prefix =
            cfg.landmark_paths.size() == 1 ? std::string() : path.stem().string() + "_";
        io::save_params(report.params, cfg.output_dir / (prefix + "params.json"));
        io::export_obj(model::synthesize(basis, report.params), cfg.output_dir / (prefix + "mesh.obj"));
        io::save_report(report, cfg.output_dir / (prefix + "report.json"));
        const auto& last = report.per_iteration.back();
        std::printf("%s variant=%s yaw_deg=%.4f e_fit=%.6g converged=%d\n", path.string().c_str(),
                    fitting::to_string(report.variant), report.pose.yaw() / deg, last.e_fit, report.converged ? 1 : 0);
        all_converged = all_converged && report.converged;
    }
    return all_converged ? exit_ok : exit_not_converged;
}

int run_eval(const EvalOptions& o)
{
    const Mesh recon = io::load_obj(o.recon);
    const Mesh truth = io::load_obj(o.truth);
    const evaluation::SurfaceScore score =
        evaluation::score_reconstruction(recon.vertices, truth.vertices, o.nose_index, o.radius);
    std::printf("rmse_mm=%.6f cropped=%zu icp_iterations=%d\n", score.rmse_mm, score.cropped_indices.size(),
                score.alignment.iterations);
    return exit_ok;
}

int run_ablate(const AblateOptions& o, const fitting::WeightConfig& weights)
{
    const model::ModelBasis basis =
        o.model.empty() ? model::generate_synthetic_basis(o.model_seed) : model::load_model(o.model);
    evaluation::BenchmarkConfig cfg;
    cfg.seed = o.seed;
    cfg.n_cases = o.cases;
    cfg.yaw_min_deg = o.yaw_min;
    cfg.yaw_max_deg = o.yaw_max;
    cfg.threads = o.threads;
    cfg.weights = weights;
    if (o.noiseless)
        cfg.noise = evaluation::NoiseModel::none();
    const evaluation::BenchmarkResult result = evaluation::run_ablation_benchmark(basis, cfg);

    std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
    if (!file)
        throw FormatError("cannot open '" + o.out + "' for writing");
    evaluation::write_csv(result, file);
    if (!file)
        throw FormatError("failed writing '" + o.out + "'");
    for (const auto& s : result.summary)
        std::printf("%-10s mean_rmse_mm=%.6f cases=%d\n", fitting::to_string(s.variant), s.mean_rmse_mm, s.cases);
    return exit_ok;
}

int run_weights(double yaw_deg, const fitting::WeightConfig& cfg)
{
    fitting::validate(cfg);
    const fitting::Weights w = fitting::adaptive_weights(yaw_deg * deg, cfg);
    std::printf("lambda_2d=%.6f lambda_3d=%.6f\n", w.lambda_2d, w.lambda_3d);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mfit: landmark-driven 3D morphable model fitting"};
    app.require_subcommand(1);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic morphable model");
    synth_cmd->add_option("--seed", synth.seed, "Model seed")->required();
    synth_cmd->add_option("--out", synth.out, "Model file (.mfit binary, .json mirror)")->required();
    synth_cmd->add_option("--vertices", synth.vertices, "Vertex count")->capture_default_str();
    synth_cmd->add_option("--shape", synth.shape, "Shape components")->capture_default_str();
    synth_cmd->add_option("--expr", synth.expr, "Expression components")->capture_default_str();
    synth_cmd->add_option("--landmarks-out", synth.landmarks_out, "Also write detections of a random face");
    synth_cmd->add_option("--truth-obj", synth.truth_obj, "Also write that face as OBJ");
    synth_cmd->add_option("--yaw-deg", synth.yaw_deg, "Head yaw of the sampled face")->capture_default_str();
    synth_cmd->add_option("--case-seed", synth.case_seed, "Seed of the sampled face")->capture_default_str();
    synth_cmd->add_flag("--noiseless", synth.noiseless, "Exact detections instead of the default noise model");

    io::RunConfig fit_cfg;
    std::string variant_name = "full";
    std::string model_path, output_dir;
    std::vector<std::string> landmark_paths;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the model to detected landmarks");
    fit_cmd->add_option("--model", model_path, "Model file")->required();
    fit_cmd->add_option("--landmarks", landmark_paths, "Landmark JSON file(s)")->required();
    fit_cmd->add_option("--variant", variant_name, "2D, 3D, 2D+3D, 2D+3D+W or 2D+3D+P+W (full)")
        ->capture_default_str();
    fit_cmd->add_option("--out", output_dir, "Output directory")->required();
    fit_cmd->add_option("--seed", fit_cfg.seed, "Recorded for reproducibility; fitting itself is deterministic");
    add_weight_options(*fit_cmd, fit_cfg.weights);

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score a reconstruction against ground truth");
    eval_cmd->add_option("--recon", eval.recon, "Reconstructed mesh (OBJ)")->required();
    eval_cmd->add_option("--truth", eval.truth, "Ground-truth mesh (OBJ)")->required();
    eval_cmd->add_option("--nose-index", eval.nose_index, "Nose tip vertex of the reconstruction (0-based)")
        ->required();
    eval_cmd->add_option("--radius", eval.radius, "Crop radius, mm")->capture_default_str();

    AblateOptions ablate;
    fitting::WeightConfig ablate_weights;
    auto* ablate_cmd = app.add_subcommand("ablate", "Run the synthetic ablation benchmark");
    ablate_cmd->add_option("--seed", ablate.seed, "Benchmark seed")->required();
    ablate_cmd->add_option("--cases", ablate.cases, "Number of faces")->capture_default_str();
    ablate_cmd->add_option("--yaw-min", ablate.yaw_min, "Smallest |yaw|, degrees")->capture_default_str();
    ablate_cmd->add_option("--yaw-max", ablate.yaw_max, "Largest |yaw|, degrees")->capture_default_str();
    ablate_cmd->add_option("--out", ablate.out, "CSV output")->required();
    ablate_cmd->add_option("--model", ablate.model, "Model file; a synthetic model is generated if omitted");
    ablate_cmd->add_option("--model-seed", ablate.model_seed, "Seed of the generated model")->capture_default_str();
    ablate_cmd->add_option("--threads", ablate.threads, "Worker threads, 0 for all cores")->capture_default_str();
    ablate_cmd->add_flag("--noiseless", ablate.noiseless, "Exact detections instead of the default noise model");
    add_weight_options(*ablate_cmd, ablate_weights);

    double yaw_deg = 0.0;
    fitting::WeightConfig weight_cfg;
    auto* weights_cmd = app.add_subcommand("weights", "Print the adaptive 2D/3D weights for a yaw");
    weights_cmd->add_option("--yaw-deg", yaw_deg, "Yaw, degrees")->required();
    weights_cmd->add_option("--epsilon", weight_cfg.epsilon, "Large-pose boundary")->capture_default_str();
    weights_cmd->add_option("--w", weight_cfg.w, "Damping of the weaker term")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*synth_cmd)
            return run_synth(synth);
        if (*fit_cmd)
        {
            fit_cfg.model_path = model_path;
            fit_cfg.output_dir = output_dir;
            fit_cfg.landmark_paths.assign(landmark_paths.begin(), landmark_paths.end());
            return run_fit(fit_cfg, variant_name);
        }
        if (*eval_cmd)
            return run_eval(eval);
        if (*ablate_cmd)
            return run_ablate(ablate, ablate_weights);
        if (*weights_cmd)
            return run_weights(yaw_deg, weight_cfg);
    } catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
