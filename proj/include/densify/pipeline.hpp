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

// Dataset-level drivers behind the command-line tool.
//
// Dataset layout, one directory per frame:
//   <root>/<frame_id>/camera.png
//                     masks.png
//                     gt_depth.png
//                     calib.json
//                     radar/sweep_00.csv   (+ sweep_00.json), newest first
//
// Frames run in parallel on up to `jobs` threads. Every frame writes to its
// own output directory and report lines are emitted in frame order, so
// outputs do not depend on the thread count.

#ifndef DENSIFY_PIPELINE_HPP_
#define DENSIFY_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "densify/bev.hpp"
#include "densify/depth_map.hpp"
#include "densify/eval.hpp"
#include "densify/expand.hpp"
#include "densify/radar.hpp"
#include "densify/synth.hpp"

namespace densify {

// Invalid configuration; the tool exits with status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PipelineConfig {
  int sweeps = kDefaultSweepCount;
  double cap = kDefaultDepthCap;
  std::string method = "insta";  // raw | height | jbf | insta
  HeightExtendMethod height;
  JbfMethod jbf;
  InstaMethod insta;
  std::optional<CropWindow> crop;
  int jobs = 1;
  bool compensate_velocity = false;

  // Throws ConfigError.
  void Validate() const;
  ExpansionMethod Method() const;
};

// "WxH+X+Y", or "WxH" for a zero offset. Throws ConfigError.
CropWindow ParseCrop(const std::string& text);
std::string FormatCrop(const CropWindow& window);

// Flat JSON object with any of the keys
//   sweeps, cap, method, dh, radius, sigma_s, sigma_r, percentile, crop,
//   jobs, compensate_velocity, root, out
// `crop` is a "WxH+X+Y" string or null. Unknown keys and wrong types throw
// ConfigError.
struct ConfigFile {
  PipelineConfig pipeline;
  std::optional<std::filesystem::path> root;
  std::optional<std::filesystem::path> out;
};
void ApplyConfigJson(const std::string& text, ConfigFile& config);
ConfigFile ReadConfigFile(const std::filesystem::path& path);

struct FrameRecord {
  std::string frame_id;
  std::filesystem::path dir;
  std::filesystem::path camera_image;
  std::vector<std::filesystem::path> radar_sweeps;  // newest first
  std::filesystem::path masks;
  std::filesystem::path gt_depth;
  std::filesystem::path calib;
};

// Paths of one frame; files are not required to exist yet.
FrameRecord MakeFrameRecord(const std::filesystem::path& dir);
// One record per subdirectory of `root`, sorted by frame id. Throws
// ConfigError if `root` is not a directory.
std::vector<FrameRecord> DiscoverFrames(const std::filesystem::path& root);

// 8-bit guide image; RGB is converted to luma, 16-bit is scaled to 8 bits.
GrayImage LoadGuideImage(const std::filesystem::path& path);

// In-memory steps of one frame. They throw on missing or malformed inputs.
// The projected map is full-size; crop is the last step of ExpandFrame.
SparseDepthMap ProjectFrame(const FrameRecord& frame,
                            const PipelineConfig& config);
// `projected` may be full-size or already cropped to config.crop; when null
// the frame is projected first.
ExpansionResult ExpandFrame(const FrameRecord& frame,
                            const PipelineConfig& config,
                            const SparseDepthMap* projected = nullptr);

struct FrameFailure {
  std::string frame_id;
  std::string message;
};

struct RunSummary {
  std::size_t frames = 0;
  std::vector<FrameFailure> failures;
  bool ok() const { return failures.empty(); }
};

// Writes <out>/<frame_id>/depth.png.
RunSummary RunProject(const std::vector<FrameRecord>& frames,
                      const PipelineConfig& config,
                      const std::filesystem::path& out, std::ostream& log);

// Writes <out>/<frame_id>/depth.png and <out>/reports.jsonl. With
// `projected_dir`, sparse inputs are read from <projected_dir>/<id>/depth.png.
RunSummary RunExpand(const std::vector<FrameRecord>& frames,
                     const PipelineConfig& config,
                     const std::filesystem::path& out,
                     const std::optional<std::filesystem::path>& projected_dir,
                     std::ostream& log);

struct EvalOptions {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  std::string pred_name = "depth.png";
  std::string gt_name = "gt_depth.png";
  double cap = kDefaultDepthCap;
  int jobs = 1;
};

struct FrameMetrics {
  std::string frame_id;
  std::optional<MetricReport> report;  // empty when nothing overlapped
  std::size_t gt_valid_pixels = 0;
};

struct EvalResult {
  std::vector<FrameMetrics> frames;
  std::optional<MetricReport> aggregate;
  std::vector<std::string> missing_predictions;   // frame ids
  std::vector<std::string> missing_ground_truth;  // frame ids
  std::vector<FrameFailure> failures;
  bool ok() const {
    return missing_predictions.empty() && missing_ground_truth.empty() &&
           failures.empty() && aggregate.has_value();
  }
};

// Frames are the subdirectories holding the named file. A mismatch between
// the two frame sets is reported and nothing is evaluated.
EvalResult RunEval(const EvalOptions& options);
// One JSON object per frame, then {"aggregate": true, ...}.
void WriteEvalJsonl(const EvalResult& result, std::ostream& out);

void RunRender(const std::filesystem::path& depth_png,
               const std::filesystem::path& out_png, double max_depth,
               int dilate_radius);

struct BevPoolOptions {
  std::filesystem::path depth_png;
  std::filesystem::path calib;
  std::optional<std::filesystem::path> features_png;  // 8-bit gray
  int downsample = 16;
  DepthBins bins = DepthBins::Uniform();
  BevGridSpec grid;
  double cap = kDefaultDepthCap;
};

// One-hot lift of the depth map. Features are the mean feature image
// intensity per cell scaled to [0, 1], or 1 without a feature image; cells
// without a depth carry no feature.
BevGrid BevPoolFromFiles(const BevPoolOptions& options);

// Writes frames <out>/frame_0000 ... with seeds base.seed + i.
RunSummary RunSynth(const SceneSpec& base, int frames,
                    const std::filesystem::path& out, int jobs,
                    std::ostream& log);

std::string SynthFrameId(int index);

}  // namespace densify

#endif  // DENSIFY_PIPELINE_HPP_
