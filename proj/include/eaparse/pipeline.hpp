#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eaparse/config.hpp"
#include "eaparse/metrics.hpp"
#include "eaparse/roi.hpp"

namespace eaparse {

/// Everything needed to process one frame. `roi_logits[i][m]` holds model m's
/// logits for the expanded crop of `boxes[i]`.
struct FrameInput {
  std::string name;
  RgbImage image;
  LabelMap ground_truth;
  std::vector<Box> boxes;
  std::vector<std::vector<LogitsTensor>> roi_logits;
};

/// Reads a clip directory:
///
///   images/<frame>.ppm
///   gt/<frame>.pgm
///   boxes.jsonl                       {"frame": "<frame>", "box": [x0,y0,x1,y1]}
///   logits/<model>/<frame>.fplt       first box of the frame
///   logits/<model>/<frame>.<i>.fplt   i-th box (i >= 1, file order)
///
/// Frames are the image stems in sorted order; models are the sorted
/// subdirectories of logits/. Everything is validated before returning.
std::vector<FrameInput> load_clip(const std::filesystem::path& dir);

struct PipelineResult {
  std::vector<std::string> frame_names;
  std::vector<LabelMap> predictions;
  EvalReport report;
};

/// Per frame: expand + crop each box, ensemble the models' ROI logits, paste
/// back, optionally GrabCut-refine the configured classes inside each ROI;
/// then score all frames. `jobs` worker threads; output does not depend on it.
PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<FrameInput>& frames,
                            int jobs);

/// Writes pred/<frame>.pgm and report.json under `out_dir`.
void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& out_dir);

/// Non-zero class ids present in any of the maps, ascending.
std::vector<int> present_classes(const std::vector<LabelMap>& a, const std::vector<LabelMap>& b);

}  // namespace eaparse
