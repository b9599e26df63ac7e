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

#include "densify/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include "densify/calibration.hpp"
#include "densify/masks.hpp"
#include "densify/png_io.hpp"
#include "densify/render.hpp"
#include "json.hpp"

namespace densify {
namespace fs = std::filesystem;
namespace {

using nlohmann::json;

constexpr char kDepthFileName[] = "depth.png";
constexpr char kReportsFileName[] = "reports.jsonl";

void RequireFile(const fs::path& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw std::runtime_error(
        fmt::format("missing {} '{}'", what, path.string()));
  }
}

int ClampJobs(int jobs) { return std::max(jobs, 1); }

// Runs fn(i) for every frame index on up to `jobs` threads and collects the
// failures in frame order.
template <typename Fn>
std::vector<FrameFailure> ForEachFrame(const std::vector<std::string>& ids,
                                       int jobs, Fn&& fn) {
  const int count = static_cast<int>(ids.size());
  std::vector<std::optional<std::string>> errors(ids.size());
#pragma omp parallel for schedule(dynamic) num_threads(ClampJobs(jobs))
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  std::vector<FrameFailure> failures;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (errors[i]) failures.push_back({ids[i], *errors[i]});
  }
  return failures;
}

std::vector<std::string> FrameIds(const std::vector<FrameRecord>& frames) {
  std::vector<std::string> ids;
  for (const FrameRecord& frame : frames) ids.push_back(frame.frame_id);
  return ids;
}

void LogFailures(const std::vector<FrameFailure>& failures, std::ostream& log) {
  for (const FrameFailure& failure : failures) {
    log << "frame " << failure.frame_id << ": " << failure.message << "\n";
  }
}

nlohmann::ordered_json ReportJson(const MetricReport& report) {
  return {{"abs_rel", report.abs_rel},
          {"rmse", report.rmse},
          {"evaluated_pixels", report.evaluated_pixels},
          {"coverage", report.coverage},
          {"cap", report.cap}};
}

template <typename T>
T Get(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

// Frames under `dir` that contain `name`, sorted.
std::set<std::string> FramesWithFile(const fs::path& dir,
                                     const std::string& name) {
  if (!fs::is_directory(dir)) {
    throw ConfigError("not a directory: '" + dir.string() + "'");
  }
  std::set<std::string> ids;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::is_regular_file(entry.path() / name)) {
      ids.insert(entry.path().filename().string());
    }
  }
  return ids;
}

}  // namespace

void PipelineConfig::Validate() const {
  if (sweeps < 1) throw ConfigError("sweeps must be >= 1");
  if (!(cap > 0.) || cap > kMaxPngDepth) {
    throw ConfigError(fmt::format("cap must lie in (0, {}]", kMaxPngDepth));
  }
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (crop &&
      (crop->width < 1 || crop->height < 1 || crop->x < 0 || crop->y < 0)) {
    throw ConfigError("crop needs a positive size and a non-negative offset");
  }
  try {
    densify::Validate(Method());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExpansionMethod PipelineConfig::Method() const {
  if (method == "raw") return RawMethod{};
  if (method == "height") return height;
  if (method == "jbf") return jbf;
  if (method == "insta") return insta;
  throw ConfigError("unknown method '" + method +
                    "' (expected raw, height, jbf or insta)");
}

CropWindow ParseCrop(const std::string& text) {
  static const std::regex pattern(R"((\d+)x(\d+)(?:\+(\d+)\+(\d+))?)");
  std::smatch match;
  if (!std::regex_match(text, match, pattern)) {
    throw ConfigError("crop '" + text + "' is not of the form WxH+X+Y");
  }
  try {
    CropWindow window;
    window.width = std::stoi(match[1]);
    window.height = std::stoi(match[2]);
    window.x = match[3].matched ? std::stoi(match[3]) : 0;
    window.y = match[4].matched ? std::stoi(match[4]) : 0;
    if (window.width < 1 || window.height < 1) {
      throw ConfigError("crop '" + text + "' has an empty size");
    }
    return window;
  } catch (const std::out_of_range&) {
    throw ConfigError("crop '" + text + "' is out of range");
  }
}

std::string FormatCrop(const CropWindow& window) {
  return fmt::format("{}x{}+{}+{}", window.width, window.height, window.x,
                     window.y);
}

void ApplyConfigJson(const std::string& text, ConfigFile& config) {
  json object;
  try {
    object = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!object.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig& p = config.pipeline;
  for (const auto& [key, value] : object.items()) {
    if (key == "sweeps") {
      p.sweeps = Get<int>(value, key);
    } else if (key == "cap") {
      p.cap = Get<double>(value, key);
    } else if (key == "method") {
      p.method = Get<std::string>(value, key);
    } else if (key == "dh") {
      p.height.dh = Get<double>(value, key);
    } else if (key == "radius") {
      p.jbf.radius = Get<int>(value, key);
    } else if (key == "sigma_s") {
      p.jbf.sigma_s = Get<double>(value, key);
    } else if (key == "sigma_r") {
      p.jbf.sigma_r = Get<double>(value, key);
    } else if (key == "percentile") {
      p.insta.percentile = Get<double>(value, key);
    } else if (key == "crop") {
      if (value.is_null()) {
        p.crop.reset();
      } else {
        p.crop = ParseCrop(Get<std::string>(value, key));
      }
    } else if (key == "jobs") {
      p.jobs = Get<int>(value, key);
    } else if (key == "compensate_velocity") {
      p.compensate_velocity = Get<bool>(value, key);
    } else if (key == "root") {
      config.root = Get<std::string>(value, key);
    } else if (key == "out") {
      config.out = Get<std::string>(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
    if ((key == "sweeps" || key == "radius" || key == "jobs") &&
        !value.is_number_integer()) {
      throw ConfigError("config key '" + key + "' must be an integer");
    }
  }
}

ConfigFile ReadConfigFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ConfigFile config;
  ApplyConfigJson(buffer.str(), config);
  return config;
}

FrameRecord MakeFrameRecord(const fs::path& dir) {
  FrameRecord frame;
  frame.frame_id = dir.filename().string();
  frame.dir = dir;
  frame.camera_image = dir / "camera.png";
  frame.masks = dir / "masks.png";
  frame.gt_depth = dir / "gt_depth.png";
  frame.calib = dir / "calib.json";
  const fs::path radar = dir / "radar";
  if (fs::is_directory(radar)) {
    for (const fs::directory_entry& entry : fs::directory_iterator(radar)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.starts_with("sweep_") &&
          entry.path().extension() == ".csv") {
        frame.radar_sweeps.push_back(entry.path());
      }
    }
  }
  std::sort(frame.radar_sweeps.begin(), frame.radar_sweeps.end());
  return frame;
}

std::vector<FrameRecord> DiscoverFrames(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw ConfigError("dataset root '" + root.string() +
                      "' is not a directory");
  }
  std::vector<fs::path> dirs;
  for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<FrameRecord> frames;
  for (const fs::path& dir : dirs) frames.push_back(MakeFrameRecord(dir));
  return frames;
}

GrayImage LoadGuideImage(const fs::path& path) {
  const PngImage png = ReadPng(path);
  if (png.channels != 1 && png.channels != 3) {
    throw PngError(path.string() + ": guide must be gray or RGB, got " +
                   std::to_string(png.channels) + " channels");
  }
  const double scale = png.bit_depth == 16 ? 255. / 65535. : 1.;
  GrayImage image(png.width, png.height);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    double value;
    if (png.channels == 1) {
      value = png.samples[i];
    } else {
      value = 0.299 * png.samples[3 * i] + 0.587 * png.samples[3 * i + 1] +
              0.114 * png.samples[3 * i + 2];
    }
    image.pixels[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(value * scale), 0L, 255L));
  }
  return image;
}

SparseDepthMap ProjectFrame(const FrameRecord& frame,
                            const PipelineConfig& config) {
  RequireFile(frame.calib, "calibration");
  const Calibration camera = ReadCalibration(frame.calib);
  if (static_cast<int>(frame.radar_sweeps.size()) < config.sweeps) {
    throw std::runtime_error(fmt::format("{} radar sweeps found, {} configured",
                                         frame.radar_sweeps.size(),
                                         config.sweeps));
  }
  std::vector<RadarSweep> sweeps;
  for (int s = 0; s < config.sweeps; ++s) {
    sweeps.push_back(ParseSweep(frame.radar_sweeps[s]));
  }
  AccumulateOptions options;
  options.compensate_velocity = config.compensate_velocity;
  options.reference_timestamp_us = camera.timestamp_us;
  const std::vector<Eigen::Vector3d> points =
      Accumulate(sweeps, camera.EgoToGlobal(), camera.SensorToEgo(),
                 config.sweeps, options);
  return Rasterize(points, camera.Camera(), config.cap);
}

ExpansionResult ExpandFrame(const FrameRecord& frame,
                            const PipelineConfig& config,
                            const SparseDepthMap* projected) {
  SparseDepthMap sparse =
      projected ? projected->WithCap(config.cap) : ProjectFrame(frame, config);
  RequireFile(frame.calib, "calibration");
  CameraIntrinsics intrinsics = ReadCalibration(frame.calib).Camera();

  // A full-size input is cropped after expansion; an input already cropped
  // to the configured window is expanded against equally cropped inputs.
  std::optional<CropWindow> crop_inputs;
  bool crop_output = false;
  if (sparse.width() == intrinsics.width() &&
      sparse.height() == intrinsics.height()) {
    crop_output = config.crop.has_value();
  } else if (config.crop && sparse.width() == config.crop->width &&
             sparse.height() == config.crop->height) {
    crop_inputs = config.crop;
  } else {
    throw DimensionMismatchError(fmt::format(
        "sparse map is {}x{}, calibration says {}x{}", sparse.width(),
        sparse.height(), intrinsics.width(), intrinsics.height()));
  }

  const ExpansionMethod method = config.Method();
  ExpansionInputs inputs;
  inputs.sparse = &sparse;
  std::optional<InstanceMaskSet> masks;
  std::optional<GrayImage> guide;
  if (std::holds_alternative<InstaMethod>(method)) {
    RequireFile(frame.masks, "instance masks");
    masks = LoadMasks(frame.masks, intrinsics.width(), intrinsics.height());
    if (crop_inputs) {
      const CropWindow& w = *crop_inputs;
      if (w.x + w.width > masks->width() || w.y + w.height > masks->height()) {
        throw std::out_of_range("crop window exceeds the mask image");
      }
      std::vector<InstanceId> labels;
      labels.reserve(static_cast<std::size_t>(w.width) * w.height);
      for (int v = w.y; v < w.y + w.height; ++v) {
        for (int u = w.x; u < w.x + w.width; ++u) {
          labels.push_back(masks->label(u, v));
        }
      }
      auto names = masks->class_names();
      masks = InstanceMaskSet(w.width, w.height, std::move(labels));
      masks->set_class_names(std::move(names));
    }
    inputs.masks = &*masks;
  } else if (std::holds_alternative<JbfMethod>(method)) {
    RequireFile(frame.camera_image, "camera image");
    guide = LoadGuideImage(frame.camera_image);
    if (crop_inputs) guide = Crop(*guide, *crop_inputs);
    inputs.guide = &*guide;
  }
  if (crop_inputs) {
    intrinsics = intrinsics.Cropped(crop_inputs->x, crop_inputs->y,
                                    crop_inputs->width, crop_inputs->height);
  }
  inputs.intrinsics = &intrinsics;

  ExpansionResult result = Expand(method, inputs);
  if (crop_output) {
    result.map = Crop(result.map, *config.crop);
    result.report.input_density = Crop(sparse, *config.crop).density();
    result.report.output_density = result.map.density();
  }
  return result;
}

RunSummary RunProject(const std::vector<FrameRecord>& frames,
                      const PipelineConfig& config, const fs::path& out,
                      std::ostream& log) {
  config.Validate();
  RunSummary summary;
  summary.frames = frames.size();
  summary.failures = ForEachFrame(FrameIds(frames), config.jobs, [&](int i) {
    SparseDepthMap map = ProjectFrame(frames[i], config);
    if (config.crop) map = Crop(map, *config.crop);
    const fs::path dir = out / frames[i].frame_id;
    fs::create_directories(dir);
    WriteDepthPng(dir / kDepthFileName, map);
  });
  LogFailures(summary.failures, log);
  return summary;
}

RunSummary RunExpand(const std::vector<FrameRecord>& frames,
                     const PipelineConfig& config, const fs::path& out,
                     const std::optional<fs::path>& projected_dir,
                     std::ostream& log) {
  config.Validate();
  const std::string method_name = MethodName(config.Method());
  std::vector<std::optional<std::string>> lines(frames.size());
  RunSummary summary;
  summary.frames = frames.size();
  summary.failures = ForEachFrame(FrameIds(frames), config.jobs, [&](int i) {
    const FrameRecord& frame = frames[i];
    std::optional<SparseDepthMap> projected;
    if (projected_dir) {
      const fs::path input = *projected_dir / frame.frame_id / kDepthFileName;
      RequireFile(input, "projected depth map");
      projected = ReadDepthPng(input);
    }
    const ExpansionResult result =
        ExpandFrame(frame, config, projected ? &*projected : nullptr);
    const fs::path dir = out / frame.frame_id;
    fs::create_directories(dir);
    WriteDepthPng(dir / kDepthFileName, result.map);
    nlohmann::ordered_json line;
    line["frame_id"] = frame.frame_id;
    line["method"] = method_name;
    line["input_density"] = result.report.input_density;
    line["output_density"] = result.report.output_density;
    line["instances_total"] = result.report.instances_total;
    line["instances_filled"] = result.report.instances_filled;
    lines[i] = line.dump();
  });
  fs::create_directories(out);
  std::ofstream reports(out / kReportsFileName, std::ios::binary);
  if (!reports) {
    throw std::runtime_error("cannot write " +
                             (out / kReportsFileName).string());
  }
  for (const std::optional<std::string>& line : lines) {
    if (line) reports << *line << "\n";
  }
  LogFailures(summary.failures, log);
  return summary;
}

EvalResult RunEval(const EvalOptions& options) {
  if (!(options.cap > 0.)) throw ConfigError("cap must be > 0");
  const std::set<std::string> pred =
      FramesWithFile(options.pred_dir, options.pred_name);
  const std::set<std::string> gt =
      FramesWithFile(options.gt_dir, options.gt_name);
  EvalResult result;
  std::set_difference(gt.begin(), gt.end(), pred.begin(), pred.end(),
                      std::back_inserter(result.missing_predictions));
  std::set_difference(pred.begin(), pred.end(), gt.begin(), gt.end(),
                      std::back_inserter(result.missing_ground_truth));
  if (!result.missing_predictions.empty() ||
      !result.missing_ground_truth.empty()) {
    return result;
  }

  const std::vector<std::string> ids(gt.begin(), gt.end());
  std::vector<MetricAccumulator> sums(ids.size(),
                                      MetricAccumulator(options.cap));
  result.failures = ForEachFrame(ids, options.jobs, [&](int i) {
    const SparseDepthMap p =
        ReadDepthPng(options.pred_dir / ids[i] / options.pred_name);
    const SparseDepthMap g =
        ReadDepthPng(options.gt_dir / ids[i] / options.gt_name);
    sums[i].Add(p, g);
  });
  std::set<std::string> failed;
  for (const FrameFailure& failure : result.failures) {
    failed.insert(failure.frame_id);
  }

  // Pooled in frame order so the aggregate is independent of the job count.
  MetricAccumulator total(options.cap);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (failed.contains(ids[i])) continue;
    FrameMetrics frame;
    frame.frame_id = ids[i];
    frame.gt_valid_pixels = sums[i].gt_valid_pixels();
    if (sums[i].evaluated_pixels() > 0) frame.report = sums[i].Report();
    result.frames.push_back(std::move(frame));
    total.Merge(sums[i]);
  }
  if (total.evaluated_pixels() > 0) result.aggregate = total.Report();
  return result;
}

void WriteEvalJsonl(const EvalResult& result, std::ostream& out) {
  for (const FrameMetrics& frame : result.frames) {
    nlohmann::ordered_json line;
    line["frame_id"] = frame.frame_id;
    if (frame.report) {
      const nlohmann::ordered_json report = ReportJson(*frame.report);
      for (const auto& [key, value] : report.items()) {
        line[key] = value;
      }
    } else {
      line["abs_rel"] = nullptr;
      line["rmse"] = nullptr;
      line["evaluated_pixels"] = 0;
      line["coverage"] = 0.;
    }
    line["gt_valid_pixels"] = frame.gt_valid_pixels;
    out << line.dump() << "\n";
  }
  nlohmann::ordered_json aggregate;
  aggregate["aggregate"] = true;
  aggregate["frames"] = result.frames.size();
  if (result.aggregate) {
    const nlohmann::ordered_json report = ReportJson(*result.aggregate);
    for (const auto& [key, value] : report.items()) {
      aggregate[key] = value;
    }
  } else {
    aggregate["abs_rel"] = nullptr;
    aggregate["rmse"] = nullptr;
    aggregate["evaluated_pixels"] = 0;
  }
  out << aggregate.dump() << "\n";
}

void RunRender(const fs::path& depth_png, const fs::path& out_png,
               double max_depth, int dilate_radius) {
  const SparseDepthMap map = ReadDepthPng(depth_png);
  if (out_png.has_parent_path()) fs::create_directories(out_png.parent_path());
  WritePng(out_png, RenderDepth(map, max_depth, dilate_radius));
}

BevGrid BevPoolFromFiles(const BevPoolOptions& options) {
  options.grid.Validate();
  const Calibration camera = ReadCalibration(options.calib);
  const CameraIntrinsics& intrinsics = camera.Camera();
  const SparseDepthMap depth = ReadDepthPng(options.depth_png, options.cap);
  if (depth.width() != intrinsics.width() ||
      depth.height() != intrinsics.height()) {
    throw BevDimensionError(
        fmt::format("depth map is {}x{}, calibration says {}x{}", depth.width(),
                    depth.height(), intrinsics.width(), intrinsics.height()));
  }
  const DepthLiftInput lift =
      OneHotFromDepth(depth, options.downsample, options.bins);
  const int grid_w = lift.distribution.width();
  const int grid_h = lift.distribution.height();

  std::optional<GrayImage> image;
  if (options.features_png) {
    image = ReadGrayPng(*options.features_png);
    if (image->width != depth.width() || image->height != depth.height()) {
      throw BevDimensionError("feature image size differs from the depth map");
    }
  }
  const int ds = options.downsample;
  FeatureMap features(grid_w, grid_h, 1);
  for (int gv = 0; gv < grid_h; ++gv) {
    for (int gu = 0; gu < grid_w; ++gu) {
      if (!lift.valid[static_cast<std::size_t>(gv) * grid_w + gu]) continue;
      double value = 1.;
      if (image) {
        double sum = 0.;
        for (int dv = 0; dv < ds; ++dv) {
          for (int du = 0; du < ds; ++du) {
            sum += image->at(gu * ds + du, gv * ds + dv);
          }
        }
        value = sum / (255. * ds * ds);
      }
      features.at(gu, gv, 0) = value;
    }
  }
  const std::vector<FrustumPoint> frustum =
      MakeFrustum(intrinsics, ds, options.bins);
  return VoxelPool(frustum, Lift(features, lift.distribution),
                   camera.SensorToEgo(), options.grid);
}

std::string SynthFrameId(int index) {
  return fmt::format("frame_{:04d}", index);
}

RunSummary RunSynth(const SceneSpec& base, int frames, const fs::path& out,
                    int jobs, std::ostream& log) {
  if (frames < 0) throw ConfigError("frame count must be >= 0");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  try {
    base.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::vector<std::string> ids;
  for (int i = 0; i < frames; ++i) ids.push_back(SynthFrameId(i));
  RunSummary summary;
  summary.frames = ids.size();
  summary.failures = ForEachFrame(ids, jobs, [&](int i) {
    SceneSpec spec = base;
    spec.seed = base.seed + static_cast<std::uint64_t>(i);
    WriteFrame(out / ids[i], Generate(spec));
  });
  LogFailures(summary.failures, log);
  return summary;
}

}  // namespace densify
