#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eaparse/augment.hpp"
#include "eaparse/boundary.hpp"
#include "eaparse/config.hpp"
#include "eaparse/ensemble.hpp"
#include "eaparse/error.hpp"
#include "eaparse/grabcut.hpp"
#include "eaparse/metrics.hpp"
#include "eaparse/pipeline.hpp"
#include "eaparse/rng.hpp"
#include "eaparse/roi.hpp"
#include "eaparse/segloss.hpp"
#include "eaparse/tensorio.hpp"

namespace fs = std::filesystem;
using namespace eaparse;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool print_config = false;
};

PipelineConfig load_config(const GlobalOptions& g) {
  PipelineConfig cfg;
  if (!g.config_path.empty()) {
    const auto bytes = tensorio::read_file(g.config_path);
    cfg = parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  tensorio::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---- edges ----------------------------------------------------------------

struct EdgesArgs {
  std::string labels, out;
  std::optional<int> radius;
};

void run_edges(const GlobalOptions& g, const EdgesArgs& a) {
  const PipelineConfig cfg = load_config(g);
  const LabelMap labels = tensorio::read_label_map(a.labels);
  const BinaryMask mask = edge_attention_mask(labels, StructuringRadius(a.radius.value_or(cfg.edge_radius)));
  tensorio::write_mask(mask, a.out);
}

// ---- loss -----------------------------------------------------------------

struct LossArgs {
  std::string logits, labels, mask, edge_logits, grad_out, edge_grad_out;
  std::optional<int> edge_mask_radius;
  std::optional<double> edge_weight, boundary_weight;
};

void run_loss(const GlobalOptions& g, const LossArgs& a) {
  const PipelineConfig cfg = load_config(g);
  LossWeights weights = cfg.loss;
  if (a.edge_weight) weights.lambda_edge = *a.edge_weight;
  if (a.boundary_weight) weights.lambda_boundary = *a.boundary_weight;
  weights.validate();

  const LogitsTensor logits = tensorio::read_logits(a.logits);
  const LabelMap labels = tensorio::read_label_map(a.labels);
  std::optional<BinaryMask> mask;
  if (!a.mask.empty()) mask = tensorio::read_mask(a.mask);
  std::optional<LogitsTensor> edge_logits;
  if (!a.edge_logits.empty()) edge_logits = tensorio::read_logits(a.edge_logits);
  if (!a.edge_grad_out.empty() && !edge_logits) {
    fail(Errc::InvalidArgument, "--edge-grad-out needs --edge-logits");
  }

  const bool want = !a.grad_out.empty() || !a.edge_grad_out.empty();
  const LossResult seg = softmax_cross_entropy(logits, labels, mask ? &*mask : nullptr, want);
  std::optional<LossResult> edge_att;
  if (a.edge_mask_radius) {
    edge_att = edge_attention_loss(logits, labels,
                                   edge_attention_mask(labels, StructuringRadius(*a.edge_mask_radius)), want);
  }
  std::optional<LossResult> bnd;
  if (edge_logits) bnd = boundary_bce(*edge_logits, extract_boundary(labels), want);
  const TotalLoss total =
      total_loss(seg, edge_att ? &*edge_att : nullptr, bnd ? &*bnd : nullptr, weights, want);

  if (!a.grad_out.empty()) tensorio::write_logits(*total.seg_gradient, a.grad_out);
  if (!a.edge_grad_out.empty()) tensorio::write_logits(*total.edge_gradient, a.edge_grad_out);
  nlohmann::ordered_json out;
  out["loss"] = total.loss;
  out["pixels"] = total.contributing_pixels;
  std::cout << out.dump() << "\n";
}

// ---- augment --------------------------------------------------------------

struct AugmentArgs {
  std::string op, image, labels, side, out_prefix;
};

void run_augment(const GlobalOptions& g, const AugmentArgs& a) {
  const PipelineConfig cfg = load_config(g);
  const SwapTable swaps(cfg.swap_pairs);
  const RgbImage image = tensorio::read_rgb_image(a.image);
  const LabelMap labels = tensorio::read_label_map(a.labels);

  std::string op = a.op;
  std::optional<CutSide> side;
  if (!a.side.empty()) side = parse_cut_side(a.side);
  if (op == "random") {
    static const char* const kOps[] = {"hflip", "rot90", "rot270", "cuthalf"};
    Rng rng(cfg.seed);
    op = kOps[rng.below(4)];
    if (op == "cuthalf" && !side) side = static_cast<CutSide>(rng.below(4));
  }

  AugmentedPair result;
  if (op == "hflip") {
    result = hflip_with_swap(image, labels, swaps);
  } else if (op == "rot90") {
    result = rotate_quarter(image, labels, 1);
  } else if (op == "rot270") {
    result = rotate_quarter(image, labels, 3);
  } else if (op == "cuthalf") {
    if (!side) fail(Errc::InvalidArgument, "cuthalf needs --side");
    result = cut_half(image, labels, *side);
  } else {
    fail(Errc::InvalidArgument, "unknown op '" + op + "'");
  }
  tensorio::write_rgb_image(result.image, a.out_prefix + ".ppm");
  tensorio::write_label_map(result.labels, a.out_prefix + ".pgm");
}

// ---- grabcut --------------------------------------------------------------

struct GrabcutArgs {
  std::string image, labels, out, energy_trace;
  int class_id = 0;
  std::optional<double> gamma;
  std::optional<int> components, iters, erode, dilate;
};

void run_grabcut(const GlobalOptions& g, const GrabcutArgs& a) {
  const PipelineConfig cfg = load_config(g);
  GrabcutParams params = cfg.grabcut;
  if (a.gamma) params.gamma = *a.gamma;
  if (a.components) params.components_k = *a.components;
  if (a.iters) params.iterations = *a.iters;
  if (a.erode) params.erode_radius = *a.erode;
  if (a.dilate) params.dilate_radius = *a.dilate;
  params.rng_seed = cfg.seed;
  params.validate();

  const RgbImage image = tensorio::read_rgb_image(a.image);
  const LabelMap labels = tensorio::read_label_map(a.labels);
  std::vector<double> trace;
  const LabelMap refined = refine_class(labels, image, a.class_id, params, &trace);
  tensorio::write_label_map(refined, a.out);
  if (!a.energy_trace.empty()) {
    nlohmann::ordered_json doc;
    doc["energy_trace"] = trace;
    write_text(a.energy_trace, doc.dump(2) + "\n");
  }
}

// ---- ensemble -------------------------------------------------------------

struct EnsembleArgs {
  std::vector<std::string> inputs;
  int height = 0, width = 0;
  std::string out;
};

void run_ensemble(const GlobalOptions& g, const EnsembleArgs& a) {
  load_config(g);
  std::vector<LogitsTensor> tensors;
  for (const auto& path : a.inputs) tensors.push_back(tensorio::read_logits(path));
  const LabelMap pred = ensemble_argmax(tensors, a.height, a.width);
  tensorio::write_label_map(pred, a.out);
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string pred_dir, gt_dir, out;
  std::vector<int> classes;
  std::optional<int> tolerance;
};

void run_eval(const GlobalOptions& g, const EvalArgs& a) {
  const PipelineConfig cfg = load_config(g);
  if (!fs::is_directory(a.gt_dir)) fail(Errc::IoFailure, "missing directory " + a.gt_dir);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(a.gt_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) fail(Errc::EmptyInput, "no .pgm files under " + a.gt_dir);

  std::vector<LabelMap> preds, gts;
  for (const auto& name : names) {
    gts.push_back(tensorio::read_label_map(fs::path(a.gt_dir) / name));
    preds.push_back(tensorio::read_label_map(fs::path(a.pred_dir) / name));
  }
  std::vector<int> classes = a.classes;
  if (classes.empty()) classes = cfg.classes.value_or(present_classes(preds, gts));
  int tolerance = 0;
  if (a.tolerance) {
    tolerance = *a.tolerance;
  } else {
    tolerance = cfg.tolerance.value_or(default_boundary_tolerance(gts.front().height(), gts.front().width()));
  }
  if (tolerance < 0) fail(Errc::InvalidArgument, "tolerance must be >= 0");
  const EvalReport report = evaluate_frames(preds, gts, classes, tolerance);
  write_text(a.out, report.to_json());
}

// ---- roi ------------------------------------------------------------------

struct RoiBoxArgs {
  std::string box, boxes_file, frame;
  int index = 0;
};

Box resolve_box(const RoiBoxArgs& a) {
  if (!a.box.empty()) return parse_box(a.box);
  if (a.boxes_file.empty()) fail(Errc::InvalidArgument, "need --box or --boxes");
  if (a.frame.empty()) fail(Errc::InvalidArgument, "--boxes needs --frame");
  const auto bytes = tensorio::read_file(a.boxes_file);
  const auto lines = parse_box_lines(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  int seen = 0;
  for (const auto& fb : lines) {
    if (fb.frame != a.frame) continue;
    if (seen++ == a.index) return fb.box;
  }
  fail(Errc::InvalidBox, "no box " + std::to_string(a.index) + " for frame '" + a.frame + "'");
}

struct RoiCropArgs {
  RoiBoxArgs box;
  std::string image, labels, out;
  std::optional<double> expand;
};

void run_roi_crop(const GlobalOptions& g, const RoiCropArgs& a) {
  load_config(g);
  const Box raw = resolve_box(a.box);
  if (!a.image.empty()) {
    const RgbImage image = tensorio::read_rgb_image(a.image);
    const Box b = a.expand ? expand_box(raw, *a.expand, image.width(), image.height()) : raw;
    tensorio::write_rgb_image(crop(image, b), a.out);
  } else {
    const LabelMap labels = tensorio::read_label_map(a.labels);
    const Box b = a.expand ? expand_box(raw, *a.expand, labels.width(), labels.height()) : raw;
    tensorio::write_label_map(crop(labels, b), a.out);
  }
}

struct RoiPasteArgs {
  RoiBoxArgs box;
  std::string canvas, patch, out;
};

void run_roi_paste(const GlobalOptions& g, const RoiPasteArgs& a) {
  load_config(g);
  const Box b = resolve_box(a.box);
  const LabelMap canvas = tensorio::read_label_map(a.canvas);
  const LabelMap patch = tensorio::read_label_map(a.patch);
  tensorio::write_label_map(paste(canvas, patch, b), a.out);
}

// ---- pipeline -------------------------------------------------------------

struct PipelineArgs {
  std::string clip, out;
  std::vector<int> grabcut_classes;
  bool no_grabcut = false;
};

void run_pipeline_cmd(const GlobalOptions& g, const PipelineArgs& a) {
  PipelineConfig cfg = load_config(g);
  if (!a.grabcut_classes.empty()) cfg.grabcut_classes = a.grabcut_classes;
  if (a.no_grabcut) cfg.grabcut_classes.clear();
  if (g.jobs < 1) fail(Errc::InvalidArgument, "--jobs must be >= 1");
  const auto frames = load_clip(a.clip);
  const PipelineResult result = run_pipeline(cfg, frames, g.jobs);
  write_pipeline_outputs(result, a.out);
}

void add_box_options(CLI::App* cmd, RoiBoxArgs& b) {
  auto* box = cmd->add_option("--box", b.box, "Box as x0,y0,x1,y1 (half-open)");
  auto* boxes = cmd->add_option("--boxes", b.boxes_file, "JSON lines file of {\"frame\":..., \"box\":[...]}");
  box->excludes(boxes);
  cmd->add_option("--frame", b.frame, "Frame name to look up in --boxes")->needs(boxes);
  cmd->add_option("--index", b.index, "Which of the frame's boxes (file order)")->needs(boxes)->check(
      CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Face-parsing post-processing toolkit"};
  app.require_subcommand(0, 1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (overrides the config)");
  app.add_option("--jobs", g.jobs, "Worker threads for pipeline")->check(CLI::PositiveNumber);
  app.add_flag("--print-config", g.print_config, "Print the effective config as JSON and exit");

  std::function<void()> action;

  EdgesArgs edges;
  auto* c_edges = app.add_subcommand("edges", "Edge-attention band of a label map");
  c_edges->add_option("--labels", edges.labels, "Label map PGM")->required();
  c_edges->add_option("--radius", edges.radius, "Dilation radius in pixels");
  c_edges->add_option("--out", edges.out, "Output mask PGM")->required();
  c_edges->callback([&] { action = [&] { run_edges(g, edges); }; });

  LossArgs loss;
  auto* c_loss = app.add_subcommand("loss", "Segmentation loss and gradients");
  c_loss->add_option("--logits", loss.logits, "Segmentation logits FPLT")->required();
  c_loss->add_option("--labels", loss.labels, "Label map PGM")->required();
  c_loss->add_option("--mask", loss.mask, "Restrict plain CE to this mask");
  c_loss->add_option("--edge-logits", loss.edge_logits, "1-channel edge-head logits FPLT");
  c_loss->add_option("--edge-mask-radius", loss.edge_mask_radius, "Enable edge-attention CE with this radius");
  c_loss->add_option("--edge-weight", loss.edge_weight, "Weight of the edge-attention term");
  c_loss->add_option("--boundary-weight", loss.boundary_weight, "Weight of the edge-head BCE term");
  c_loss->add_option("--grad-out", loss.grad_out, "Write d loss / d logits as FPLT");
  c_loss->add_option("--edge-grad-out", loss.edge_grad_out, "Write d loss / d edge logits as FPLT");
  c_loss->callback([&] { action = [&] { run_loss(g, loss); }; });

  AugmentArgs aug;
  auto* c_aug = app.add_subcommand("augment", "Label-consistent augmentation");
  c_aug->add_option("--op", aug.op, "hflip|rot90|rot270|cuthalf|random")
      ->required()
      ->check(CLI::IsMember({"hflip", "rot90", "rot270", "cuthalf", "random"}));
  c_aug->add_option("--image", aug.image, "Image PPM")->required();
  c_aug->add_option("--labels", aug.labels, "Label map PGM")->required();
  c_aug->add_option("--side", aug.side, "Half kept by cuthalf")
      ->check(CLI::IsMember({"left", "right", "top", "bottom"}));
  c_aug->add_option("--out-prefix", aug.out_prefix, "Writes <prefix>.ppm and <prefix>.pgm")->required();
  c_aug->callback([&] { action = [&] { run_augment(g, aug); }; });

  GrabcutArgs gc;
  auto* c_gc = app.add_subcommand("grabcut", "Refine one class with GrabCut");
  c_gc->add_option("--image", gc.image, "Image PPM")->required();
  c_gc->add_option("--labels", gc.labels, "Label map PGM")->required();
  c_gc->add_option("--class", gc.class_id, "Class id to refine")->required()->check(CLI::Range(0, 255));
  c_gc->add_option("--gamma", gc.gamma, "Smoothness weight");
  c_gc->add_option("--components", gc.components, "Mixture components per side");
  c_gc->add_option("--iters", gc.iters, "Iterations");
  c_gc->add_option("--erode", gc.erode, "Trimap erosion radius");
  c_gc->add_option("--dilate", gc.dilate, "Trimap dilation radius");
  c_gc->add_option("--out", gc.out, "Refined label map PGM")->required();
  c_gc->add_option("--energy-trace", gc.energy_trace, "Write per-iteration energies as JSON");
  c_gc->callback([&] { action = [&] { run_grabcut(g, gc); }; });

  EnsembleArgs ens;
  auto* c_ens = app.add_subcommand("ensemble", "Average model probabilities and take the argmax");
  c_ens->add_option("--inputs", ens.inputs, "Logits FPLT files")->required();
  c_ens->add_option("--height", ens.height, "Output height")->required()->check(CLI::PositiveNumber);
  c_ens->add_option("--width", ens.width, "Output width")->required()->check(CLI::PositiveNumber);
  c_ens->add_option("--out", ens.out, "Label map PGM")->required();
  c_ens->callback([&] { action = [&] { run_ensemble(g, ens); }; });

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "J/F evaluation over paired directories");
  c_eval->add_option("--pred-dir", ev.pred_dir, "Predicted label maps")->required();
  c_eval->add_option("--gt-dir", ev.gt_dir, "Ground-truth label maps")->required();
  c_eval->add_option("--classes", ev.classes, "Comma-separated class ids")->delimiter(',');
  c_eval->add_option("--tolerance", ev.tolerance, "Boundary tolerance in pixels");
  c_eval->add_option("--out", ev.out, "Report JSON")->required();
  c_eval->callback([&] { action = [&] { run_eval(g, ev); }; });

  auto* c_roi = app.add_subcommand("roi", "Box crop and paste");
  c_roi->require_subcommand(1);
  RoiCropArgs rc;
  auto* c_crop = c_roi->add_subcommand("crop", "Crop an image or label map to a box");
  auto* o_img = c_crop->add_option("--image", rc.image, "Image PPM");
  auto* o_lbl = c_crop->add_option("--labels", rc.labels, "Label map PGM");
  o_img->excludes(o_lbl);
  c_crop->require_option(1, 0);
  add_box_options(c_crop, rc.box);
  c_crop->add_option("--expand", rc.expand, "Expand the box by this ratio first");
  c_crop->add_option("--out", rc.out, "Output PPM or PGM")->required();
  c_crop->callback([&] {
    if (rc.image.empty() && rc.labels.empty()) throw CLI::ValidationError("need --image or --labels");
    action = [&] { run_roi_crop(g, rc); };
  });
  RoiPasteArgs rp;
  auto* c_paste = c_roi->add_subcommand("paste", "Paste a label patch into a canvas");
  c_paste->add_option("--canvas", rp.canvas, "Canvas label map PGM")->required();
  c_paste->add_option("--patch", rp.patch, "Patch label map PGM")->required();
  add_box_options(c_paste, rp.box);
  c_paste->add_option("--out", rp.out, "Output PGM")->required();
  c_paste->callback([&] { action = [&] { run_roi_paste(g, rp); }; });

  PipelineArgs pl;
  auto* c_pl = app.add_subcommand("pipeline", "Run the full flow on a clip directory");
  c_pl->add_option("--clip", pl.clip, "Clip directory")->required();
  c_pl->add_option("--out", pl.out, "Output directory (pred/*.pgm, report.json)")->required();
  c_pl->add_option("--grabcut-classes", pl.grabcut_classes, "Classes to refine (overrides the config)")
      ->delimiter(',');
  c_pl->add_flag("--no-grabcut", pl.no_grabcut, "Disable refinement");
  c_pl->callback([&] { action = [&] { run_pipeline_cmd(g, pl); }; });

  for (auto* sub : {c_edges, c_loss, c_aug, c_gc, c_ens, c_eval, c_roi, c_pl}) sub->fallthrough();
  c_crop->fallthrough();
  c_paste->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (g.print_config) {
      std::cout << config_to_json(load_config(g));
      return 0;
    }
    if (!action) {
      std::cerr << app.help();
      return 2;
    }
    action();
    return 0;
  } catch (const Error& e) {
    std::cerr << "eaparse: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "eaparse: internal error: " << e.what() << "\n";
    return 1;
  }
}
