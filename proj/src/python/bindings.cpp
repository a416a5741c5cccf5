#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstring>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "eaparse/augment.hpp"
#include "eaparse/boundary.hpp"
#include "eaparse/config.hpp"
#include "eaparse/ensemble.hpp"
#include "eaparse/error.hpp"
#include "eaparse/grabcut.hpp"
#include "eaparse/metrics.hpp"
#include "eaparse/pipeline.hpp"
#include "eaparse/roi.hpp"
#include "eaparse/segloss.hpp"
#include "eaparse/tensorio.hpp"

namespace py = pybind11;
using namespace eaparse;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <typename R>
R raster_from(const U8Array& a, const char* what) {
  if constexpr (R::kChannels == 1) {
    if (a.ndim() != 2) fail(Errc::InvalidShape, std::string(what) + " must be a 2-D array");
  } else {
    if (a.ndim() != 3 || a.shape(2) != R::kChannels) {
      fail(Errc::InvalidShape, std::string(what) + " must be an HxWx3 array");
    }
  }
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> data(a.data(), a.data() + a.size());
  return R(h, w, std::move(data));
}

template <typename R>
U8Array raster_to(const R& r) {
  std::vector<py::ssize_t> shape{r.height(), r.width()};
  if constexpr (R::kChannels != 1) shape.push_back(R::kChannels);
  U8Array out(shape);
  std::memcpy(out.mutable_data(), r.data().data(), r.data().size());
  return out;
}

BinaryMask mask_from(const U8Array& a) {
  BinaryMask m = raster_from<BinaryMask>(a, "mask");
  validate_mask(m);
  return m;
}

LogitsTensor tensor_from(const F64Array& a) {
  if (a.ndim() != 3) fail(Errc::InvalidShape, "logits must be a CxHxW array");
  std::vector<double> data(a.data(), a.data() + a.size());
  return LogitsTensor(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                      static_cast<int>(a.shape(2)), std::move(data));
}

template <typename Tag>
F64Array tensor_to(const Tensor3<Tag>& t) {
  F64Array out({t.channels(), t.height(), t.width()});
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

py::object gradient_or_none(const std::optional<LogitsTensor>& g) {
  return g ? py::object(tensor_to(*g)) : py::object(py::none());
}

py::tuple loss_tuple(const LossResult& r) {
  return py::make_tuple(r.loss, r.contributing_pixels, gradient_or_none(r.gradient));
}

py::object report_dict(const EvalReport& report) {
  return py::module_::import("json").attr("loads")(report.to_json());
}

py::tuple pair_tuple(const AugmentedPair& p) { return py::make_tuple(raster_to(p.image), raster_to(p.labels)); }

GrabcutParams make_params(int components, double gamma, int iterations, int erode, int dilate,
                          std::uint64_t seed) {
  GrabcutParams p;
  p.components_k = components;
  p.gamma = gamma;
  p.iterations = iterations;
  p.erode_radius = erode;
  p.dilate_radius = dilate;
  p.rng_seed = seed;
  p.validate();
  return p;
}

Box box_from(const std::tuple<int, int, int, int>& t) {
  return Box{std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)};
}

std::tuple<int, int, int, int> box_to(const Box& b) { return {b.x0, b.y0, b.x1, b.y1}; }

}  // namespace

PYBIND11_MODULE(_eaparse, m) {
  m.doc() = "Face-parsing post-processing toolkit";

  static PyObject* error_type = py::exception<Error>(m, "EaparseError", PyExc_ValueError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  // tensorio
  m.def("read_label_map", [](const std::filesystem::path& p) { return raster_to(tensorio::read_label_map(p)); });
  m.def("write_label_map", [](const U8Array& a, const std::filesystem::path& p) {
    tensorio::write_label_map(raster_from<LabelMap>(a, "labels"), p);
  });
  m.def("read_mask", [](const std::filesystem::path& p) { return raster_to(tensorio::read_mask(p)); });
  m.def("write_mask", [](const U8Array& a, const std::filesystem::path& p) {
    tensorio::write_mask(mask_from(a), p);
  });
  m.def("read_rgb_image", [](const std::filesystem::path& p) { return raster_to(tensorio::read_rgb_image(p)); });
  m.def("write_rgb_image", [](const U8Array& a, const std::filesystem::path& p) {
    tensorio::write_rgb_image(raster_from<RgbImage>(a, "image"), p);
  });
  m.def("read_logits", [](const std::filesystem::path& p) { return tensor_to(tensorio::read_logits(p)); });
  m.def("write_logits", [](const F64Array& a, const std::filesystem::path& p) {
    tensorio::write_logits(tensor_from(a), p);
  });

  // boundary
  m.def("extract_boundary", [](const U8Array& labels) {
    return raster_to(extract_boundary(raster_from<LabelMap>(labels, "labels")));
  });
  m.def("dilate", [](const U8Array& mask, int radius) {
    return raster_to(dilate(mask_from(mask), StructuringRadius(radius)));
  }, py::arg("mask"), py::arg("radius"));
  m.def("erode", [](const U8Array& mask, int radius) {
    return raster_to(erode(mask_from(mask), StructuringRadius(radius)));
  }, py::arg("mask"), py::arg("radius"));
  m.def("edge_attention_mask", [](const U8Array& labels, int radius) {
    return raster_to(edge_attention_mask(raster_from<LabelMap>(labels, "labels"), StructuringRadius(radius)));
  }, py::arg("labels"), py::arg("radius") = kDefaultEdgeRadius);

  // segloss
  m.def("softmax_cross_entropy", [](const F64Array& logits, const U8Array& labels, std::optional<U8Array> mask) {
    std::optional<BinaryMask> m;
    if (mask) m = mask_from(*mask);
    return loss_tuple(softmax_cross_entropy(tensor_from(logits), raster_from<LabelMap>(labels, "labels"),
                                            m ? &*m : nullptr, true));
  }, py::arg("logits"), py::arg("labels"), py::arg("mask") = py::none(),
     "Returns (loss, contributing_pixels, gradient).");
  m.def("edge_attention_loss", [](const F64Array& logits, const U8Array& labels, int radius) {
    const LabelMap l = raster_from<LabelMap>(labels, "labels");
    return loss_tuple(edge_attention_loss(tensor_from(logits), l, edge_attention_mask(l, StructuringRadius(radius)),
                                          true));
  }, py::arg("logits"), py::arg("labels"), py::arg("radius") = kDefaultEdgeRadius);
  m.def("boundary_bce", [](const F64Array& edge_logit, const U8Array& boundary) {
    return loss_tuple(boundary_bce(tensor_from(edge_logit), mask_from(boundary), true));
  }, py::arg("edge_logit"), py::arg("boundary"));

  // augment
  m.def("hflip_with_swap", [](const U8Array& image, const U8Array& labels, std::vector<std::pair<int, int>> swaps) {
    return pair_tuple(hflip_with_swap(raster_from<RgbImage>(image, "image"), raster_from<LabelMap>(labels, "labels"),
                                      SwapTable(std::move(swaps))));
  }, py::arg("image"), py::arg("labels"), py::arg("swap_pairs") = std::vector<std::pair<int, int>>{});
  m.def("rotate_quarter", [](const U8Array& image, const U8Array& labels, int quarters) {
    return pair_tuple(
        rotate_quarter(raster_from<RgbImage>(image, "image"), raster_from<LabelMap>(labels, "labels"), quarters));
  }, py::arg("image"), py::arg("labels"), py::arg("quarters"));
  m.def("cut_half", [](const U8Array& image, const U8Array& labels, const std::string& side) {
    return pair_tuple(cut_half(raster_from<RgbImage>(image, "image"), raster_from<LabelMap>(labels, "labels"),
                               parse_cut_side(side)));
  }, py::arg("image"), py::arg("labels"), py::arg("side"));

  // grabcut
  m.def("grabcut_refine", [](const U8Array& image, const U8Array& init, int components, double gamma,
                             int iterations, int erode, int dilate, std::uint64_t seed) {
    const GrabcutParams p = make_params(components, gamma, iterations, erode, dilate, seed);
    GrabcutResult r;
    {
      const RgbImage img = raster_from<RgbImage>(image, "image");
      const BinaryMask m = mask_from(init);
      py::gil_scoped_release release;
      r = grabcut_refine(img, m, p);
    }
    return py::make_tuple(raster_to(r.refined), r.energy_trace);
  }, py::arg("image"), py::arg("init"), py::arg("components") = 5, py::arg("gamma") = 50.0,
     py::arg("iterations") = 5, py::arg("erode") = 3, py::arg("dilate") = 10, py::arg("seed") = 0,
     "Returns (refined_mask, energy_trace).");

  // ensemble
  m.def("softmax_map", [](const F64Array& logits) { return tensor_to(softmax_map(tensor_from(logits))); });
  m.def("ensemble_argmax", [](const std::vector<F64Array>& inputs, int height, int width) {
    std::vector<LogitsTensor> tensors;
    for (const auto& a : inputs) tensors.push_back(tensor_from(a));
    return raster_to(ensemble_argmax(tensors, height, width));
  }, py::arg("inputs"), py::arg("height"), py::arg("width"));

  // metrics
  m.def("region_jaccard", [](const U8Array& pred, const U8Array& gt) {
    return region_jaccard(mask_from(pred), mask_from(gt));
  }, "None when both masks are empty.");
  m.def("boundary_f", [](const U8Array& pred, const U8Array& gt, int tolerance) {
    return boundary_f(mask_from(pred), mask_from(gt), tolerance);
  }, py::arg("pred"), py::arg("gt"), py::arg("tolerance"), "None when both boundaries are empty.");
  m.def("default_boundary_tolerance", &default_boundary_tolerance, py::arg("height"), py::arg("width"));
  m.def("evaluate_frames", [](const std::vector<U8Array>& preds, const std::vector<U8Array>& gts,
                              const std::vector<int>& classes, int tolerance) {
    std::vector<LabelMap> p, g;
    for (const auto& a : preds) p.push_back(raster_from<LabelMap>(a, "prediction"));
    for (const auto& a : gts) g.push_back(raster_from<LabelMap>(a, "ground truth"));
    return report_dict(evaluate_frames(p, g, classes, tolerance));
  }, py::arg("preds"), py::arg("gts"), py::arg("classes"), py::arg("tolerance"));

  // roi
  m.def("expand_box", [](const std::tuple<int, int, int, int>& box, double ratio, int frame_w, int frame_h) {
    return box_to(expand_box(box_from(box), ratio, frame_w, frame_h));
  }, py::arg("box"), py::arg("ratio"), py::arg("frame_width"), py::arg("frame_height"));
  m.def("paste", [](const U8Array& canvas, const U8Array& patch, const std::tuple<int, int, int, int>& box) {
    return raster_to(paste(raster_from<LabelMap>(canvas, "canvas"), raster_from<LabelMap>(patch, "patch"),
                           box_from(box)));
  }, py::arg("canvas"), py::arg("patch"), py::arg("box"));

  // pipeline
  m.def("default_config", [] { return config_to_json(PipelineConfig{}); });
  m.def("run_clip", [](const std::filesystem::path& clip, const std::filesystem::path& out,
                       const std::string& config_json, int jobs) {
    const PipelineConfig cfg = parse_config(config_json);
    EvalReport report;
    {
      py::gil_scoped_release release;
      const PipelineResult result = run_pipeline(cfg, load_clip(clip), jobs);
      write_pipeline_outputs(result, out);
      report = result.report;
    }
    return report_dict(report);
  }, py::arg("clip"), py::arg("out"), py::arg("config_json") = "{}", py::arg("jobs") = 1,
     "Runs the full flow on a clip directory, writes pred/*.pgm and report.json, returns the report.");
}
