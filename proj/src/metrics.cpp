#include "eaparse/metrics.hpp"

#include <cmath>

#include "json.hpp"

#include "eaparse/boundary.hpp"

namespace eaparse {
namespace {

void require_same_shape(const BinaryMask& pred, const BinaryMask& gt) {
  if (!pred.same_shape(gt)) {
    fail(Errc::ShapeMismatch, "prediction is " + std::to_string(pred.height()) + "x" +
                                  std::to_string(pred.width()) + ", ground truth is " +
                                  std::to_string(gt.height()) + "x" + std::to_string(gt.width()));
  }
}

/// Boundary of a mask viewed as a two-class label map.
BinaryMask mask_boundary(const BinaryMask& mask) {
  return extract_boundary(LabelMap(mask.height(), mask.width(), mask.bytes()));
}

std::size_t count_overlap(const BinaryMask& a, const BinaryMask& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) n += (a.data()[i] && b.data()[i]) ? 1 : 0;
  return n;
}

}  // namespace

std::optional<double> region_jaccard(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
    const bool p = pred.data()[i] != 0;
    const bool g = gt.data()[i] != 0;
    inter += (p && g) ? 1 : 0;
    uni += (p || g) ? 1 : 0;
  }
  if (uni == 0) return std::nullopt;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<double> boundary_f(const BinaryMask& pred, const BinaryMask& gt, int tolerance_px) {
  require_same_shape(pred, gt);
  if (tolerance_px < 0) fail(Errc::InvalidArgument, "boundary tolerance must be >= 0");
  const BinaryMask bp = mask_boundary(pred);
  const BinaryMask bg = mask_boundary(gt);
  const std::size_t np = count_set(bp);
  const std::size_t ng = count_set(bg);
  if (np == 0 && ng == 0) return std::nullopt;
  if (np == 0 || ng == 0) return 0.0;
  const StructuringRadius tol(tolerance_px);
  const double precision =
      static_cast<double>(count_overlap(bp, dilate(bg, tol))) / static_cast<double>(np);
  const double recall =
      static_cast<double>(count_overlap(bg, dilate(bp, tol))) / static_cast<double>(ng);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

int default_boundary_tolerance(int height, int width) {
  const double diagonal = std::hypot(static_cast<double>(height), static_cast<double>(width));
  return std::max(1, static_cast<int>(std::lround(0.008 * diagonal)));
}

EvalReport evaluate_frames(std::span<const LabelMap> preds, std::span<const LabelMap> gts,
                           std::span<const int> class_ids, int tolerance_px) {
  if (preds.empty() || class_ids.empty()) fail(Errc::EmptyInput, "no frames or no classes to score");
  if (preds.size() != gts.size()) {
    fail(Errc::ShapeMismatch, std::to_string(preds.size()) + " predictions for " +
                                  std::to_string(gts.size()) + " ground-truth frames");
  }
  for (std::size_t f = 0; f < preds.size(); ++f) {
    if (!preds[f].same_shape(gts[f])) {
      fail(Errc::ShapeMismatch, "frame " + std::to_string(f) + " prediction and ground truth differ in shape");
    }
  }

  EvalReport report;
  double sum_j = 0.0;
  double sum_f = 0.0;
  int classes_counted = 0;
  for (int class_id : class_ids) {
    if (class_id < 0 || class_id > 255) {
      fail(Errc::InvalidArgument, "class id " + std::to_string(class_id) + " outside 0..255");
    }
    if (report.per_class.contains(class_id)) continue;
    ClassScore score;
    double j_total = 0.0;
    double f_total = 0.0;
    for (std::size_t f = 0; f < preds.size(); ++f) {
      const BinaryMask p = class_mask(preds[f], class_id);
      const BinaryMask g = class_mask(gts[f], class_id);
      const auto j = region_jaccard(p, g);
      if (!j) continue;
      // Both boundaries empty while J counts means full-frame masks; J is then
      // the only meaningful contour score (1 if both full, 0 otherwise).
      const double fv = boundary_f(p, g, tolerance_px).value_or(*j);
      j_total += *j;
      f_total += fv;
      ++score.frames_counted;
    }
    if (score.frames_counted == 0) continue;
    score.mean_j = j_total / score.frames_counted;
    score.mean_f = f_total / score.frames_counted;
    report.per_class[class_id] = score;
    sum_j += score.mean_j;
    sum_f += score.mean_f;
    ++classes_counted;
  }
  if (classes_counted == 0) {
    fail(Errc::NoClassEverPresent, "none of the requested classes occurs in any frame");
  }
  report.mean_j = sum_j / classes_counted;
  report.mean_f = sum_f / classes_counted;
  report.j_and_f = (report.mean_j + report.mean_f) / 2.0;
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json per;
  for (const auto& [id, s] : per_class) {
    per[std::to_string(id)] = {{"J", s.mean_j}, {"F", s.mean_f}, {"frames", s.frames_counted}};
  }
  nlohmann::ordered_json doc;
  doc["per_class"] = per.is_null() ? nlohmann::ordered_json::object() : per;
  doc["mean_J"] = mean_j;
  doc["mean_F"] = mean_f;
  doc["J_and_F"] = j_and_f;
  return doc.dump(2) + "\n";
}

}  // namespace eaparse
