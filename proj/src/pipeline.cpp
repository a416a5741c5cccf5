#include "eaparse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "eaparse/boundary.hpp"
#include "eaparse/ensemble.hpp"
#include "eaparse/grabcut.hpp"
#include "eaparse/tensorio.hpp"

namespace eaparse {
namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::size_t frame, std::size_t roi, int class_id) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ frame);
  s = splitmix64(s ^ roi);
  return splitmix64(s ^ static_cast<std::uint64_t>(class_id));
}

std::vector<std::string> sorted_stems(const fs::path& dir, std::string_view extension) {
  if (!fs::is_directory(dir)) fail(Errc::IoFailure, "missing directory " + dir.string());
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

std::string roi_file_name(const std::string& frame, std::size_t index) {
  return index == 0 ? frame + ".fplt" : frame + "." + std::to_string(index) + ".fplt";
}

LabelMap process_frame(const PipelineConfig& config, const FrameInput& frame, std::size_t frame_index) {
  const int h = frame.image.height();
  const int w = frame.image.width();
  LabelMap canvas(h, w, 0);
  std::vector<Box> rois;
  for (std::size_t i = 0; i < frame.boxes.size(); ++i) {
    const Box roi = expand_box(frame.boxes[i], config.roi_expand, w, h);
    const LabelMap patch = ensemble_argmax(frame.roi_logits[i], roi.height(), roi.width());
    canvas = paste(canvas, patch, roi);
    rois.push_back(roi);
  }

  for (int class_id : config.grabcut_classes) {
    for (std::size_t i = 0; i < rois.size(); ++i) {
      const Box& roi = rois[i];
      const LabelMap local = crop(canvas, roi);
      const std::size_t members = count_set(class_mask(local, class_id));
      if (members == 0 || members == local.pixel_count()) continue;
      GrabcutParams params = config.grabcut;
      params.rng_seed = derive_seed(config.seed, frame_index, i, class_id);
      const LabelMap refined = refine_class(local, crop(frame.image, roi), class_id, params);
      for (int r = 0; r < roi.height(); ++r) {
        for (int c = 0; c < roi.width(); ++c) canvas.at(roi.y0 + r, roi.x0 + c) = refined.at(r, c);
      }
    }
  }
  return canvas;
}

}  // namespace

std::vector<FrameInput> load_clip(const fs::path& dir) {
  const auto names = sorted_stems(dir / "images", ".ppm");
  if (names.empty()) fail(Errc::EmptyInput, "no frames under " + (dir / "images").string());

  const fs::path logits_dir = dir / "logits";
  if (!fs::is_directory(logits_dir)) fail(Errc::IoFailure, "missing directory " + logits_dir.string());
  std::vector<std::string> models;
  for (const auto& entry : fs::directory_iterator(logits_dir)) {
    if (entry.is_directory()) models.push_back(entry.path().filename().string());
  }
  std::sort(models.begin(), models.end());
  if (models.empty()) fail(Errc::EmptyInput, "no model directories under " + logits_dir.string());

  const auto box_bytes = tensorio::read_file(dir / "boxes.jsonl");
  const auto box_lines =
      parse_box_lines(std::string_view(reinterpret_cast<const char*>(box_bytes.data()), box_bytes.size()));
  std::map<std::string, std::vector<Box>> boxes_by_frame;
  for (const auto& fb : box_lines) {
    if (!std::binary_search(names.begin(), names.end(), fb.frame)) {
      fail(Errc::InvalidBox, "boxes.jsonl names unknown frame '" + fb.frame + "'");
    }
    boxes_by_frame[fb.frame].push_back(fb.box);
  }

  std::vector<FrameInput> frames;
  for (const auto& name : names) {
    FrameInput f;
    f.name = name;
    f.image = tensorio::read_rgb_image(dir / "images" / (name + ".ppm"));
    f.ground_truth = tensorio::read_label_map(dir / "gt" / (name + ".pgm"));
    if (!f.ground_truth.same_shape(f.image)) {
      fail(Errc::ShapeMismatch, "frame '" + name + "': ground truth and image differ in shape");
    }
    const auto it = boxes_by_frame.find(name);
    if (it == boxes_by_frame.end()) fail(Errc::InvalidBox, "frame '" + name + "' has no box");
    f.boxes = it->second;
    for (std::size_t i = 0; i < f.boxes.size(); ++i) {
      if (!f.boxes[i].within(f.image.width(), f.image.height())) {
        fail(Errc::InvalidBox, "frame '" + name + "': box " + std::to_string(i) + " exceeds the frame");
      }
      std::vector<LogitsTensor> per_model;
      for (const auto& model : models) {
        per_model.push_back(tensorio::read_logits(logits_dir / model / roi_file_name(name, i)));
        if (per_model.back().channels() != per_model.front().channels()) {
          fail(Errc::ChannelMismatch, "frame '" + name + "': models disagree on class count");
        }
      }
      f.roi_logits.push_back(std::move(per_model));
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<int> present_classes(const std::vector<LabelMap>& a, const std::vector<LabelMap>& b) {
  std::set<int> ids;
  for (const auto* maps : {&a, &b}) {
    for (const auto& m : *maps) {
      for (auto v : m.data()) {
        if (v != 0) ids.insert(v);
      }
    }
  }
  return {ids.begin(), ids.end()};
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<FrameInput>& frames,
                            int jobs) {
  if (frames.empty()) fail(Errc::EmptyInput, "pipeline needs at least one frame");
  const std::size_t n = frames.size();
  std::vector<LabelMap> predictions(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        predictions[i] = process_frame(config, frames[i], i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto thread_count = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(n)));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < thread_count; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  PipelineResult result;
  std::vector<LabelMap> gts;
  for (const auto& f : frames) {
    result.frame_names.push_back(f.name);
    gts.push_back(f.ground_truth);
  }
  const std::vector<int> classes =
      config.classes ? *config.classes : present_classes(predictions, gts);
  const int tolerance = config.tolerance.value_or(
      default_boundary_tolerance(gts.front().height(), gts.front().width()));
  result.report = evaluate_frames(predictions, gts, classes, tolerance);
  result.predictions = std::move(predictions);
  return result;
}

void write_pipeline_outputs(const PipelineResult& result, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir / "pred", ec);
  if (ec) fail(Errc::IoFailure, "cannot create " + (out_dir / "pred").string() + ": " + ec.message());
  for (std::size_t i = 0; i < result.predictions.size(); ++i) {
    tensorio::write_label_map(result.predictions[i], out_dir / "pred" / (result.frame_names[i] + ".pgm"));
  }
  const std::string report = result.report.to_json();
  tensorio::write_file(out_dir / "report.json",
                       std::span(reinterpret_cast<const std::uint8_t*>(report.data()), report.size()));
}

}  // namespace eaparse
