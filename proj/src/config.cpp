#include "eaparse/config.hpp"

#include <set>

#include "json.hpp"

namespace eaparse {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail(Errc::InvalidConfig, "unknown key '" + where + key + "'");
  }
}

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    fail(Errc::InvalidConfig, "key '" + key + "' has the wrong type");
  }
}

int get_int(const json& value, const std::string& key) {
  if (!value.is_number_integer()) fail(Errc::InvalidConfig, "key '" + key + "' must be an integer");
  return get_as<int>(value, key);
}

double get_number(const json& value, const std::string& key) {
  if (!value.is_number()) fail(Errc::InvalidConfig, "key '" + key + "' must be a number");
  return value.get<double>();
}

std::vector<int> get_int_list(const json& value, const std::string& key) {
  if (!value.is_array()) fail(Errc::InvalidConfig, "key '" + key + "' must be an array");
  std::vector<int> out;
  for (const auto& item : value) out.push_back(get_int(item, key));
  return out;
}

}  // namespace

PipelineConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(Errc::InvalidConfig, e.what());
  }
  if (!doc.is_object()) fail(Errc::InvalidConfig, "config must be a JSON object");
  reject_unknown(doc,
                 {"swap_pairs", "edge_radius", "lambda_edge", "lambda_boundary", "grabcut",
                  "grabcut_classes", "roi_expand", "classes", "tolerance", "seed"},
                 "");

  PipelineConfig cfg;
  if (doc.contains("swap_pairs")) {
    const auto& pairs = doc["swap_pairs"];
    if (!pairs.is_array()) fail(Errc::InvalidConfig, "swap_pairs must be an array of pairs");
    for (const auto& p : pairs) {
      const auto ids = get_int_list(p, "swap_pairs");
      if (ids.size() != 2) fail(Errc::InvalidConfig, "each swap pair needs exactly two ids");
      cfg.swap_pairs.emplace_back(ids[0], ids[1]);
    }
    SwapTable check(cfg.swap_pairs);
  }
  if (doc.contains("edge_radius")) {
    cfg.edge_radius = get_int(doc["edge_radius"], "edge_radius");
    if (cfg.edge_radius < 0) fail(Errc::InvalidConfig, "edge_radius must be >= 0");
  }
  if (doc.contains("lambda_edge")) cfg.loss.lambda_edge = get_number(doc["lambda_edge"], "lambda_edge");
  if (doc.contains("lambda_boundary")) {
    cfg.loss.lambda_boundary = get_number(doc["lambda_boundary"], "lambda_boundary");
  }
  if (doc.contains("grabcut")) {
    const auto& g = doc["grabcut"];
    if (!g.is_object()) fail(Errc::InvalidConfig, "grabcut must be an object");
    reject_unknown(g, {"components", "gamma", "iterations", "erode", "dilate"}, "grabcut.");
    if (g.contains("components")) cfg.grabcut.components_k = get_int(g["components"], "grabcut.components");
    if (g.contains("gamma")) cfg.grabcut.gamma = get_number(g["gamma"], "grabcut.gamma");
    if (g.contains("iterations")) cfg.grabcut.iterations = get_int(g["iterations"], "grabcut.iterations");
    if (g.contains("erode")) cfg.grabcut.erode_radius = get_int(g["erode"], "grabcut.erode");
    if (g.contains("dilate")) cfg.grabcut.dilate_radius = get_int(g["dilate"], "grabcut.dilate");
  }
  if (doc.contains("grabcut_classes")) {
    cfg.grabcut_classes = get_int_list(doc["grabcut_classes"], "grabcut_classes");
  }
  if (doc.contains("roi_expand")) cfg.roi_expand = get_number(doc["roi_expand"], "roi_expand");
  if (doc.contains("classes") && !doc["classes"].is_null()) {
    cfg.classes = get_int_list(doc["classes"], "classes");
  }
  if (doc.contains("tolerance") && !doc["tolerance"].is_null()) {
    cfg.tolerance = get_int(doc["tolerance"], "tolerance");
    if (*cfg.tolerance < 0) fail(Errc::InvalidConfig, "tolerance must be >= 0");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail(Errc::InvalidConfig, "seed must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  try {
    cfg.loss.validate();
    cfg.grabcut.validate();
  } catch (const Error& e) {
    fail(Errc::InvalidConfig, e.what());
  }
  if (!(cfg.roi_expand >= 0.0)) fail(Errc::InvalidConfig, "roi_expand must be >= 0");
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["swap_pairs"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : cfg.swap_pairs) doc["swap_pairs"].push_back({a, b});
  doc["edge_radius"] = cfg.edge_radius;
  doc["lambda_edge"] = cfg.loss.lambda_edge;
  doc["lambda_boundary"] = cfg.loss.lambda_boundary;
  doc["grabcut"] = {{"components", cfg.grabcut.components_k},
                    {"gamma", cfg.grabcut.gamma},
                    {"iterations", cfg.grabcut.iterations},
                    {"erode", cfg.grabcut.erode_radius},
                    {"dilate", cfg.grabcut.dilate_radius}};
  doc["grabcut_classes"] = cfg.grabcut_classes;
  doc["roi_expand"] = cfg.roi_expand;
  doc["classes"] = cfg.classes ? nlohmann::ordered_json(*cfg.classes) : nlohmann::ordered_json();
  doc["tolerance"] = cfg.tolerance ? nlohmann::ordered_json(*cfg.tolerance) : nlohmann::ordered_json();
  doc["seed"] = cfg.seed;
  return doc.dump(2) + "\n";
}

}  // namespace eaparse
