#include "eaparse/roi.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "json.hpp"

namespace eaparse {

Box parse_box(std::string_view text) {
  std::array<int, 4> v{};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t end = i + 1 < v.size() ? text.find(',', pos) : text.size();
    if (end == std::string_view::npos) fail(Errc::InvalidBox, "expected x0,y0,x1,y1");
    const auto token = text.substr(pos, end - pos);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v[i]);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail(Errc::InvalidBox, "bad box coordinate '" + std::string(token) + "'");
    }
    pos = end + 1;
  }
  const Box b{v[0], v[1], v[2], v[3]};
  if (!b.valid()) fail(Errc::InvalidBox, "box must satisfy 0 <= x0 < x1 and 0 <= y0 < y1");
  return b;
}

Box expand_box(const Box& b, double ratio, int frame_w, int frame_h) {
  if (!b.within(frame_w, frame_h)) {
    fail(Errc::InvalidBox, "box (" + std::to_string(b.x0) + "," + std::to_string(b.y0) + ")-(" +
                               std::to_string(b.x1) + "," + std::to_string(b.y1) +
                               ") is not inside the " + std::to_string(frame_w) + "x" +
                               std::to_string(frame_h) + " frame");
  }
  if (!std::isfinite(ratio) || ratio < 0.0) {
    fail(Errc::InvalidArgument, "expansion ratio must be finite and >= 0");
  }
  const double grow_x = ratio * b.width() / 2.0;
  const double grow_y = ratio * b.height() / 2.0;
  Box out;
  out.x0 = static_cast<int>(std::max(0.0, std::floor(b.x0 - grow_x)));
  out.y0 = static_cast<int>(std::max(0.0, std::floor(b.y0 - grow_y)));
  out.x1 = static_cast<int>(std::min<double>(frame_w, std::ceil(b.x1 + grow_x)));
  out.y1 = static_cast<int>(std::min<double>(frame_h, std::ceil(b.y1 + grow_y)));
  return out;
}

namespace {

void check_paste(const LabelMap& canvas, const LabelMap& patch, const Box& b) {
  if (!b.within(canvas.width(), canvas.height())) {
    fail(Errc::OutOfBounds, "paste box exceeds the canvas");
  }
  if (!patch.same_shape(b.height(), b.width())) {
    fail(Errc::SizeMismatch, "patch is " + std::to_string(patch.height()) + "x" +
                                 std::to_string(patch.width()) + ", box is " +
                                 std::to_string(b.height()) + "x" + std::to_string(b.width()));
  }
}

double max_probability(const ProbTensor& t, int r, int c) {
  double best = t.at(0, r, c);
  for (int ch = 1; ch < t.channels(); ++ch) best = std::max(best, t.at(ch, r, c));
  return best;
}

}  // namespace

LabelMap paste(const LabelMap& canvas, const LabelMap& patch, const Box& b) {
  check_paste(canvas, patch, b);
  LabelMap out = canvas;
  for (int r = 0; r < b.height(); ++r) {
    for (int c = 0; c < b.width(); ++c) {
      const auto v = patch.at(r, c);
      if (v != 0) out.at(b.y0 + r, b.x0 + c) = v;
    }
  }
  return out;
}

LabelMap paste(const LabelMap& canvas, const LabelMap& patch, const Box& b,
               const ProbTensor& canvas_prob, const ProbTensor& patch_prob) {
  check_paste(canvas, patch, b);
  if (canvas_prob.height() != canvas.height() || canvas_prob.width() != canvas.width()) {
    fail(Errc::SizeMismatch, "canvas confidence does not cover the canvas");
  }
  if (patch_prob.height() != patch.height() || patch_prob.width() != patch.width()) {
    fail(Errc::SizeMismatch, "patch confidence does not cover the patch");
  }
  LabelMap out = canvas;
  for (int r = 0; r < b.height(); ++r) {
    for (int c = 0; c < b.width(); ++c) {
      if (max_probability(patch_prob, r, c) > max_probability(canvas_prob, b.y0 + r, b.x0 + c)) {
        out.at(b.y0 + r, b.x0 + c) = patch.at(r, c);
      }
    }
  }
  return out;
}

std::vector<FrameBox> parse_box_lines(std::string_view jsonl) {
  std::vector<FrameBox> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const auto line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "box line " + std::to_string(line_no);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::InvalidBox, where + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("frame") || !doc["frame"].is_string() ||
        !doc.contains("box") || !doc["box"].is_array() || doc["box"].size() != 4) {
      fail(Errc::InvalidBox, where + ": expected {\"frame\": name, \"box\": [x0,y0,x1,y1]}");
    }
    std::array<int, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!doc["box"][i].is_number_integer()) fail(Errc::InvalidBox, where + ": non-integer coordinate");
      v[i] = doc["box"][i].get<int>();
    }
    const Box b{v[0], v[1], v[2], v[3]};
    if (!b.valid()) fail(Errc::InvalidBox, where + ": degenerate box");
    out.push_back({doc["frame"].get<std::string>(), b});
  }
  return out;
}

}  // namespace eaparse
