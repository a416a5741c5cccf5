#include "eaparse/grabcut.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "eaparse/boundary.hpp"
#include "eaparse/maxflow.hpp"

namespace eaparse {

void GrabcutParams::validate() const {
  if (components_k < 1) fail(Errc::InvalidArgument, "components_k must be >= 1");
  if (!std::isfinite(gamma) || gamma < 0.0) fail(Errc::InvalidArgument, "gamma must be >= 0");
  if (iterations < 1) fail(Errc::InvalidArgument, "iterations must be >= 1");
  if (erode_radius < 0 || dilate_radius < 0) {
    fail(Errc::InvalidArgument, "trimap radii must be >= 0");
  }
}

namespace {

void check_not_degenerate(const BinaryMask& init) {
  validate_mask(init);
  const std::size_t set = count_set(init);
  if (set == 0) fail(Errc::DegenerateMask, "initial mask is empty");
  if (set == init.pixel_count()) fail(Errc::DegenerateMask, "initial mask covers every pixel");
}

// Forward half of the 8-neighborhood: every unordered pair is visited once.
struct Offset {
  int dr;
  int dc;
  double distance;
};
const std::array<Offset, 4> kForward = {{
    {0, 1, 1.0},
    {1, 0, 1.0},
    {1, 1, std::numbers::sqrt2},
    {1, -1, std::numbers::sqrt2},
}};

Color pixel_color(const RgbImage& image, int r, int c) {
  return {static_cast<double>(image.at(r, c, 0)), static_cast<double>(image.at(r, c, 1)),
          static_cast<double>(image.at(r, c, 2))};
}

struct PairLink {
  std::size_t p;
  std::size_t q;
  double weight;
};

std::vector<PairLink> smoothness_links(const RgbImage& image, double gamma, double beta) {
  const int h = image.height();
  const int w = image.width();
  std::vector<PairLink> links;
  links.reserve(image.pixel_count() * 4);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Color zp = pixel_color(image, r, c);
      for (const auto& off : kForward) {
        const int r2 = r + off.dr;
        const int c2 = c + off.dc;
        if (r2 >= h || c2 < 0 || c2 >= w) continue;
        const double diff = (zp - pixel_color(image, r2, c2)).squaredNorm();
        links.push_back({static_cast<std::size_t>(r) * w + c, static_cast<std::size_t>(r2) * w + c2,
                         gamma * std::exp(-beta * diff) / off.distance});
      }
    }
  }
  return links;
}

struct DataTerms {
  std::vector<double> fg;  // -log p_fg(z)
  std::vector<double> bg;
};

DataTerms data_terms(std::span<const Color> colors, const ColorGmm& fg, const ColorGmm& bg) {
  DataTerms d;
  d.fg.resize(colors.size());
  d.bg.resize(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    d.fg[i] = -fg.log_likelihood(colors[i]);
    d.bg[i] = -bg.log_likelihood(colors[i]);
  }
  return d;
}

double energy(const std::vector<std::uint8_t>& fg_side, const DataTerms& data,
              const std::vector<PairLink>& links) {
  double e = 0.0;
  for (std::size_t i = 0; i < fg_side.size(); ++i) e += fg_side[i] ? data.fg[i] : data.bg[i];
  for (const auto& link : links) {
    if (fg_side[link.p] != fg_side[link.q]) e += link.weight;
  }
  return e;
}

std::vector<Color> gather(std::span<const Color> colors, const std::vector<std::uint8_t>& fg_side,
                          bool want_fg) {
  std::vector<Color> out;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    if ((fg_side[i] != 0) == want_fg) out.push_back(colors[i]);
  }
  return out;
}

/// First iteration: seeded fit. Later iterations warm-start from the previous
/// model so component slots stay stable.
ColorGmm update_side_model(const ColorGmm* previous, std::span<const Color> members,
                           const GrabcutParams& params, std::uint64_t seed) {
  if (previous == nullptr) {
    const int k = static_cast<int>(
        std::min<std::size_t>(members.size(), static_cast<std::size_t>(params.components_k)));
    return fit_gmm(members, k, seed);
  }
  if (members.empty()) return *previous;
  return refine_gmm(*previous, members, kDefaultGmmRounds);
}

}  // namespace

Trimap build_trimap(const BinaryMask& init, const GrabcutParams& params) {
  params.validate();
  check_not_degenerate(init);
  BinaryMask definite_fg = erode(init, StructuringRadius(params.erode_radius));
  if (count_set(definite_fg) == 0) definite_fg = init;
  const BinaryMask envelope = dilate(init, StructuringRadius(params.dilate_radius));

  Trimap trimap(init.height(), init.width());
  for (std::size_t i = 0; i < init.pixel_count(); ++i) {
    TrimapState s;
    if (definite_fg.data()[i]) {
      s = TrimapState::DefiniteFG;
    } else if (init.data()[i]) {
      s = TrimapState::ProbableFG;
    } else if (!envelope.data()[i]) {
      s = TrimapState::DefiniteBG;
    } else {
      s = TrimapState::ProbableBG;
    }
    trimap.data()[i] = static_cast<std::uint8_t>(s);
  }
  return trimap;
}

double smoothness_beta(const RgbImage& image) {
  const int h = image.height();
  const int w = image.width();
  double sum = 0.0;
  std::size_t pairs = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Color zp = pixel_color(image, r, c);
      for (const auto& off : kForward) {
        const int r2 = r + off.dr;
        const int c2 = c + off.dc;
        if (r2 >= h || c2 < 0 || c2 >= w) continue;
        sum += (zp - pixel_color(image, r2, c2)).squaredNorm();
        ++pairs;
      }
    }
  }
  if (pairs == 0 || sum <= 0.0) return 0.0;
  return 1.0 / (2.0 * sum / static_cast<double>(pairs));
}

GrabcutResult grabcut_refine(const RgbImage& image, const BinaryMask& init,
                             const GrabcutParams& params) {
  if (!image.same_shape(init)) fail(Errc::ShapeMismatch, "image and initial mask differ in shape");
  const Trimap trimap = build_trimap(init, params);
  const std::size_t n = image.pixel_count();
  const int w = image.width();

  std::vector<Color> colors(n);
  for (std::size_t i = 0; i < n; ++i) {
    colors[i] = pixel_color(image, static_cast<int>(i / w), static_cast<int>(i % w));
  }
  const auto links = smoothness_links(image, params.gamma, smoothness_beta(image));

  std::vector<int> node_of(n, -1);
  int node_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<TrimapState>(trimap.data()[i]);
    if (s == TrimapState::ProbableBG || s == TrimapState::ProbableFG) node_of[i] = node_count++;
  }

  std::vector<std::uint8_t> fg_side(init.data().begin(), init.data().end());
  std::optional<ColorGmm> fg_model;
  std::optional<ColorGmm> bg_model;
  GrabcutResult result;

  for (int iter = 0; iter < params.iterations; ++iter) {
    const auto fg_pixels = gather(colors, fg_side, true);
    const auto bg_pixels = gather(colors, fg_side, false);
    ColorGmm fg_candidate = update_side_model(fg_model ? &*fg_model : nullptr, fg_pixels, params,
                                              params.rng_seed);
    ColorGmm bg_candidate = update_side_model(bg_model ? &*bg_model : nullptr, bg_pixels, params,
                                              params.rng_seed ^ 0x9e3779b97f4a7c15ULL);
    DataTerms data = data_terms(colors, fg_candidate, bg_candidate);
    // Keep the previous color models if the refit would raise the energy of
    // the current segmentation.
    if (!result.energy_trace.empty() &&
        energy(fg_side, data, links) > result.energy_trace.back()) {
      data = data_terms(colors, *fg_model, *bg_model);
    } else {
      fg_model = std::move(fg_candidate);
      bg_model = std::move(bg_candidate);
    }

    // Source side = foreground. Links to definite pixels fold into the
    // terminal capacities of their probable neighbor.
    std::vector<double> src(static_cast<std::size_t>(node_count), 0.0);
    std::vector<double> sink(static_cast<std::size_t>(node_count), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (node_of[i] < 0) continue;
      src[static_cast<std::size_t>(node_of[i])] = data.bg[i];
      sink[static_cast<std::size_t>(node_of[i])] = data.fg[i];
    }
    GridGraph graph(node_count);
    for (const auto& link : links) {
      const int a = node_of[link.p];
      const int b = node_of[link.q];
      if (a >= 0 && b >= 0) {
        graph.add_edge(a, b, link.weight);
      } else if (a >= 0 || b >= 0) {
        const int node = a >= 0 ? a : b;
        const std::size_t fixed = a >= 0 ? link.q : link.p;
        auto& side = fg_side[fixed] ? src : sink;
        side[static_cast<std::size_t>(node)] += link.weight;
      }
    }
    for (int v = 0; v < node_count; ++v) {
      const auto vi = static_cast<std::size_t>(v);
      const double shift = std::min(src[vi], sink[vi]);
      graph.add_terminal(v, src[vi] - shift, sink[vi] - shift);
    }
    const MinCut cut = max_flow(graph);

    std::vector<std::uint8_t> next = fg_side;
    for (std::size_t i = 0; i < n; ++i) {
      if (node_of[i] >= 0) next[i] = cut.source_side[static_cast<std::size_t>(node_of[i])];
    }
    const double before = energy(fg_side, data, links);
    const double after = energy(next, data, links);
    // The cut is optimal in exact arithmetic; never accept a rounding-level regression.
    if (after <= before) {
      fg_side = std::move(next);
      result.energy_trace.push_back(after);
    } else {
      result.energy_trace.push_back(before);
    }
  }

  result.refined = BinaryMask(init.height(), init.width(), std::move(fg_side));
  return result;
}

LabelMap refine_class(const LabelMap& labels, const RgbImage& image, int class_id,
                      const GrabcutParams& params, std::vector<double>* energy_trace) {
  if (!labels.same_shape(image)) fail(Errc::ShapeMismatch, "labels and image differ in shape");
  const BinaryMask init = class_mask(labels, class_id);
  if (count_set(init) == 0) {
    fail(Errc::ClassAbsent, "class " + std::to_string(class_id) + " not present in labels");
  }
  const GrabcutResult refined = grabcut_refine(image, init, params);
  if (energy_trace != nullptr) *energy_trace = refined.energy_trace;
  LabelMap out = labels;
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    const bool in_class = out.data()[i] == class_id;
    if (refined.refined.data()[i] && !in_class) {
      out.data()[i] = static_cast<std::uint8_t>(class_id);
    } else if (!refined.refined.data()[i] && in_class) {
      out.data()[i] = 0;
    }
  }
  return out;
}

}  // namespace eaparse
