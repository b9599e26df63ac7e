/*
 * Copyright 2026 The Densify Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// densify: radar depth projection, expansion, evaluation and BEV pooling.
//
//   densify synth   --out DIR --frames N [--seed S] [--noise M] ...
//   densify project --root DIR --out DIR [--sweeps N] [--crop WxH+X+Y]
//   densify expand  --root DIR --out DIR [--in DIR] --method insta
//   densify eval    --pred DIR --gt DIR [--pred-name F] [--gt-name F]
//   densify render  --in depth.png --out color.png [--dilate R]
//   densify bev-pool --depth depth.png --calib calib.json --out grid.bevg
//
// Exit status: 0 on success, 1 if any frame failed, 2 on a configuration
// error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "densify/pipeline.hpp"

namespace {

using densify::ConfigError;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFrameFailure = 1;
constexpr int kExitConfig = 2;

// Flags shared by project and expand. Values are applied on top of the
// config file only when given on the command line.
struct PipelineFlags {
  std::string config;
  std::string root;
  std::string out;
  int jobs = 1;
  int sweeps = 5;
  double cap = 80.;
  std::string method;
  double dh = 0.;
  int radius = 0;
  double sigma_s = 0.;
  double sigma_r = 0.;
  double percentile = 0.;
  std::string crop;
  bool compensate_velocity = false;

  std::vector<CLI::Option*> options;
  CLI::Option* config_opt = nullptr;
  CLI::Option* root_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* sweeps_opt = nullptr;
  CLI::Option* cap_opt = nullptr;
  CLI::Option* method_opt = nullptr;
  CLI::Option* dh_opt = nullptr;
  CLI::Option* radius_opt = nullptr;
  CLI::Option* sigma_s_opt = nullptr;
  CLI::Option* sigma_r_opt = nullptr;
  CLI::Option* percentile_opt = nullptr;
  CLI::Option* crop_opt = nullptr;
  CLI::Option* compensate_opt = nullptr;
};

void AddPipelineFlags(CLI::App* app, PipelineFlags& f) {
  f.config_opt = app->add_option("--config", f.config, "flat JSON config");
  f.root_opt = app->add_option("--root", f.root, "dataset root");
  f.out_opt = app->add_option("--out", f.out, "output directory");
  f.jobs_opt = app->add_option("--jobs", f.jobs, "frames processed at once");
  f.sweeps_opt = app->add_option("--sweeps", f.sweeps,
                                 "radar sweeps accumulated (default 5)");
  f.cap_opt = app->add_option("--cap", f.cap, "depth cap in meters (80)");
  f.method_opt = app->add_option("--method", f.method,
                                 "raw | height | jbf | insta (insta)");
  f.dh_opt = app->add_option("--dh", f.dh, "height extension, meters (1.5)");
  f.radius_opt = app->add_option("--radius", f.radius, "JBF radius (15)");
  f.sigma_s_opt =
      app->add_option("--sigma-s", f.sigma_s, "JBF spatial sigma, px (7)");
  f.sigma_r_opt = app->add_option("--sigma-r", f.sigma_r,
                                  "JBF range sigma, intensity (12)");
  f.percentile_opt = app->add_option(
      "--percentile", f.percentile, "insta dominant-depth percentile (0)");
  f.crop_opt = app->add_option("--crop", f.crop, "crop window WxH+X+Y");
  f.compensate_opt =
      app->add_flag("--compensate-velocity", f.compensate_velocity,
                    "shift points by radial velocity");
}

densify::ConfigFile ResolveConfig(const PipelineFlags& f) {
  densify::ConfigFile config;
  if (f.config_opt->count()) config = densify::ReadConfigFile(f.config);
  densify::PipelineConfig& p = config.pipeline;
  if (f.root_opt->count()) config.root = f.root;
  if (f.out_opt->count()) config.out = f.out;
  if (f.jobs_opt->count()) p.jobs = f.jobs;
  if (f.sweeps_opt->count()) p.sweeps = f.sweeps;
  if (f.cap_opt->count()) p.cap = f.cap;
  if (f.method_opt->count()) p.method = f.method;
  if (f.dh_opt->count()) p.height.dh = f.dh;
  if (f.radius_opt->count()) p.jbf.radius = f.radius;
  if (f.sigma_s_opt->count()) p.jbf.sigma_s = f.sigma_s;
  if (f.sigma_r_opt->count()) p.jbf.sigma_r = f.sigma_r;
  if (f.percentile_opt->count()) p.insta.percentile = f.percentile;
  if (f.crop_opt->count()) {
    if (f.crop == "none") {
      p.crop.reset();
    } else {
      p.crop = densify::ParseCrop(f.crop);
    }
  }
  if (f.compensate_opt->count()) p.compensate_velocity = f.compensate_velocity;
  if (!config.root) throw ConfigError("--root is required");
  if (!config.out) throw ConfigError("--out is required");
  p.Validate();
  return config;
}

int Summarize(const densify::RunSummary& summary, const char* verb) {
  std::cerr << verb << " " << summary.frames - summary.failures.size() << "/"
            << summary.frames << " frames\n";
  return summary.ok() ? kExitOk : kExitFrameFailure;
}

std::vector<double> SplitNumbers(const std::string& text, std::size_t count,
                                 const char* flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (values.size() != count) {
    throw ConfigError(std::string(flag) + " expects " + std::to_string(count) +
                      " comma-separated numbers");
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar depth densification toolkit"};
  app.require_subcommand(1);

  PipelineFlags project_flags;
  CLI::App* project = app.add_subcommand(
      "project", "accumulate radar sweeps into sparse depth PNGs");
  AddPipelineFlags(project, project_flags);

  PipelineFlags expand_flags;
  std::string expand_in;
  CLI::App* expand = app.add_subcommand(
      "expand", "expand sparse radar depth and write per-frame reports");
  AddPipelineFlags(expand, expand_flags);
  CLI::Option* expand_in_opt = expand->add_option(
      "--in", expand_in, "projected maps <in>/<frame>/depth.png");

  densify::EvalOptions eval_options;
  std::string eval_out;
  CLI::App* eval = app.add_subcommand("eval", "AbsRel and RMSE against GT");
  eval->add_option("--pred", eval_options.pred_dir, "prediction root")
      ->required();
  eval->add_option("--gt", eval_options.gt_dir, "ground-truth root")
      ->required();
  eval->add_option("--pred-name", eval_options.pred_name,
                   "prediction file per frame (depth.png)");
  eval->add_option("--gt-name", eval_options.gt_name,
                   "ground-truth file per frame (gt_depth.png)");
  eval->add_option("--cap", eval_options.cap, "depth cap in meters (80)");
  eval->add_option("--jobs", eval_options.jobs, "frames processed at once");
  eval->add_option("--out", eval_out, "JSONL output file (default stdout)");

  std::string render_in;
  std::string render_out;
  double render_max = 80.;
  int render_dilate = 0;
  CLI::App* render = app.add_subcommand("render", "color-map a depth PNG");
  render->add_option("--in", render_in, "depth PNG")->required();
  render->add_option("--out", render_out, "RGB PNG")->required();
  render->add_option("--max-depth", render_max, "depth at the far color (80)");
  render->add_option("--dilate", render_dilate, "point radius in pixels (0)");

  densify::BevPoolOptions bev_options;
  std::string bev_depth;
  std::string bev_calib;
  std::string bev_features;
  std::string bev_out;
  std::string bev_bins = "1,80,118";
  std::string bev_grid = "-51.2,51.2,-51.2,51.2,0.8";
  CLI::App* bev = app.add_subcommand(
      "bev-pool", "lift a depth map to a frustum and pool it into a BEV grid");
  bev->add_option("--depth", bev_depth, "depth PNG")->required();
  bev->add_option("--calib", bev_calib, "camera calibration JSON")->required();
  CLI::Option* bev_features_opt =
      bev->add_option("--features", bev_features, "8-bit gray feature image");
  bev->add_option("--downsample", bev_options.downsample,
                  "feature stride in pixels (16)");
  bev->add_option("--bins", bev_bins, "d_min,d_max,count (1,80,118)");
  bev->add_option("--grid", bev_grid,
                  "x_min,x_max,y_min,y_max,res (-51.2,51.2,-51.2,51.2,0.8)");
  bev->add_option("--cap", bev_options.cap, "depth cap in meters (80)");
  bev->add_option("--out", bev_out, "BEVG output file")->required();

  densify::SceneSpec scene;
  std::string synth_out;
  int synth_frames = 1;
  int synth_jobs = 1;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--out", synth_out, "dataset root")->required();
  synth->add_option("--frames", synth_frames, "number of frames (1)");
  synth->add_option("--seed", scene.seed, "seed of frame 0 (0)");
  synth->add_option("--objects", scene.object_count, "objects per frame (6)");
  synth->add_option("--depth-min", scene.depth_min, "meters (5)");
  synth->add_option("--depth-max", scene.depth_max, "meters (60)");
  synth->add_option("--points", scene.radar_points_per_object,
                    "radar points per object and sweep (3)");
  synth->add_option("--noise", scene.radar_noise_sigma,
                    "radar depth noise sigma, meters (0)");
  synth->add_option("--ego-speed", scene.ego_speed, "m/s (0)");
  synth->add_option("--sweeps", scene.sweep_count, "sweeps per frame (5)");
  synth->add_option("--jobs", synth_jobs, "frames generated at once");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (project->parsed()) {
      const densify::ConfigFile config = ResolveConfig(project_flags);
      return Summarize(
          densify::RunProject(densify::DiscoverFrames(*config.root),
                              config.pipeline, *config.out, std::cerr),
          "projected");
    }
    if (expand->parsed()) {
      const densify::ConfigFile config = ResolveConfig(expand_flags);
      std::optional<fs::path> in;
      if (expand_in_opt->count()) in = expand_in;
      return Summarize(
          densify::RunExpand(densify::DiscoverFrames(*config.root),
                             config.pipeline, *config.out, in, std::cerr),
          "expanded");
    }
    if (eval->parsed()) {
      if (eval_options.jobs < 1) throw ConfigError("--jobs must be >= 1");
      const densify::EvalResult result = densify::RunEval(eval_options);
      for (const std::string& id : result.missing_predictions) {
        std::cerr << "frame " << id << ": no prediction\n";
      }
      for (const std::string& id : result.missing_ground_truth) {
        std::cerr << "frame " << id << ": no ground truth\n";
      }
      for (const densify::FrameFailure& failure : result.failures) {
        std::cerr << "frame " << failure.frame_id << ": " << failure.message
                  << "\n";
      }
      if (!result.missing_predictions.empty() ||
          !result.missing_ground_truth.empty()) {
        std::cerr << "frame sets differ, nothing evaluated\n";
        return kExitFrameFailure;
      }
      if (eval_out.empty()) {
        densify::WriteEvalJsonl(result, std::cout);
      } else {
        std::ofstream out(eval_out, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + eval_out + "'");
        densify::WriteEvalJsonl(result, out);
      }
      if (!result.aggregate) std::cerr << "no pixel was evaluated\n";
      return result.ok() ? kExitOk : kExitFrameFailure;
    }
    if (render->parsed()) {
      densify::RunRender(render_in, render_out, render_max, render_dilate);
      return kExitOk;
    }
    if (bev->parsed()) {
      bev_options.depth_png = bev_depth;
      bev_options.calib = bev_calib;
      if (bev_features_opt->count()) bev_options.features_png = bev_features;
      const std::vector<double> bins = SplitNumbers(bev_bins, 3, "--bins");
      const std::vector<double> grid = SplitNumbers(bev_grid, 5, "--grid");
      try {
        bev_options.bins = densify::DepthBins::Uniform(
            bins[0], bins[1], static_cast<int>(bins[2]));
        bev_options.grid = {grid[0], grid[1], grid[2], grid[3], grid[4]};
        bev_options.grid.Validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      densify::WriteBevGrid(bev_out, densify::BevPoolFromFiles(bev_options));
      return kExitOk;
    }
    if (synth->parsed()) {
      return Summarize(densify::RunSynth(scene, synth_frames, synth_out,
                                         synth_jobs, std::cerr),
                       "generated");
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFrameFailure;
  }
  return kExitConfig;
}
