// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dupcox/error.hpp"
#include "dupcox/harness.hpp"

namespace dupcox {
namespace {

std::vector<Point> default_ring() {
  // A closed loop around the centre of the default window.
  std::vector<Point> ring;
  constexpr int kSides = 12;
  for (int k = 0; k <= kSides; ++k) {
    const double a = 2.0 * 3.14159265358979323846 * (k % kSides) / kSides;
    ring.push_back({405.0 + 260.0 * std::cos(a), 405.0 + 220.0 * std::sin(a)});
  }
  return ring;
}

double phi_for_index(int k) { return k == 1 ? 15.0 : k == 2 ? 20.0 : 30.0; }

const char* class_name(ScenarioClass c) {
  switch (c) {
    case ScenarioClass::homogeneous: return "homogeneous";
    case ScenarioClass::ih1: return "ih1";
    case ScenarioClass::ih2: return "ih2";
  }
  return "?";
}

const char* mean_kind_name(MeanKind k) {
  switch (k) {
    case MeanKind::constant: return "constant";
    case MeanKind::linear: return "linear";
    case MeanKind::synthetic_covariates: return "synthetic_covariates";
  }
  return "?";
}

const char* partition_name(PartitionKind k) {
  switch (k) {
    case PartitionKind::grid: return "grid";
    case PartitionKind::tessellation: return "tessellation";
    case PartitionKind::file: return "file";
  }
  return "?";
}

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw config_error(fmt::format("config: '{}' must be a mapping", where));
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key))
      throw config_error(fmt::format("config: unknown key '{}' in {}", key, where));
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw config_error(fmt::format("config: invalid value for '{}'", what));
  }
}

std::array<int, 2> get_pair(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() != 2)
    throw config_error(fmt::format("config: '{}' must be [nx, ny]", what));
  return {get<int>(node[0], what), get<int>(node[1], what)};
}

std::vector<Point> get_points(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) throw config_error(fmt::format("config: '{}' must be a list of [x, y]", what));
  std::vector<Point> pts;
  for (const auto& p : node) {
    if (!p.IsSequence() || p.size() != 2)
      throw config_error(fmt::format("config: '{}' entries must be [x, y]", what));
    pts.push_back({get<double>(p[0], what), get<double>(p[1], what)});
  }
  return pts;
}

// "rule" or a number; rule maps to -1.
double rule_or_number(const YAML::Node& node, const std::string& what) {
  if (node.IsScalar() && node.Scalar() == "rule") return -1.0;
  return get<double>(node, what);
}

Window parse_window(const YAML::Node& node) {
  if (node.IsSequence()) {
    if (node.size() != 4) throw config_error("config: window must be [xmin, xmax, ymin, ymax]");
    return Window::rectangle(get<double>(node[0], "window"), get<double>(node[1], "window"),
                             get<double>(node[2], "window"), get<double>(node[3], "window"));
  }
  check_keys(node, "window", {"polygon"});
  return Window::polygon(get_points(node["polygon"], "window.polygon"));
}

// Shortest round-trip decimal form.
YAML::Node num(double v) { return YAML::Node(fmt::format("{}", v)); }

YAML::Node points_node(const std::vector<Point>& pts) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (auto p : pts) {
    YAML::Node q(YAML::NodeType::Sequence);
    q.push_back(num(p.x));
    q.push_back(num(p.y));
    q.SetStyle(YAML::EmitterStyle::Flow);
    n.push_back(q);
  }
  return n;
}

YAML::Node flow_pair(double a, double b) {
  YAML::Node n(YAML::NodeType::Sequence);
  n.push_back(num(a));
  n.push_back(num(b));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (replications < 1) throw config_error("config: replications must be >= 1");
  if (workers < 1) throw config_error("config: workers must be >= 1");
  if (sim_nx < 2 || sim_ny < 2) throw config_error("config: simulation grid must be at least 2 x 2");
  if (intensity_nx < 1 || intensity_ny < 1) throw config_error("config: intensity grid must be positive");
  if (r_nodes < 2) throw config_error("config: r_nodes must be >= 2");
  cov.validate();
  if (!window.is_rectangle())
    throw config_error("config: simulation requires a rectangular window");
  if (corruption.fractions.empty()) throw config_error("config: no corruption fractions");
  for (double f : corruption.fractions)
    if (!(f >= 0.0 && f <= 1.0))
      throw config_error(fmt::format("config: corruption fraction {} outside [0, 1]", f));
  if (corruption.partition == PartitionKind::grid && (corruption.nx < 1 || corruption.ny < 1))
    throw config_error("config: partition grid must be positive");
  if (corruption.partition == PartitionKind::tessellation && corruption.cells < 1)
    throw config_error("config: tessellation needs at least one cell");
  if (corruption.partition == PartitionKind::file && corruption.file.empty())
    throw config_error("config: partition file not given");
  if (!(jitter_radius > 0.0)) throw config_error("config: jitter_radius must be > 0");
  if (scenario_class == ScenarioClass::ih1 && !(bandwidth > 0.0))
    throw config_error("config: ih1 needs a positive bandwidth");
  for (double h : bandwidth_candidates)
    if (!(h > 0.0)) throw config_error("config: bandwidth candidates must be > 0");
  if (mean.kind == MeanKind::synthetic_covariates) {
    if (mean.anchors < 1) throw config_error("config: synthetic covariates need anchors >= 1");
    if (mean.polyline.size() < 2) throw config_error("config: synthetic covariates need a polyline");
    if (!(mean.expected_count > 0.0)) throw config_error("config: expected_count must be > 0");
  }
}

std::vector<std::string> preset_labels() {
  return {"H.1", "H.2", "H.3", "IH1.1", "IH1.2", "IH1.3", "IH2.1", "IH2.2", "IH2.3"};
}

ScenarioConfig preset(const std::string& label) {
  ScenarioConfig c;
  c.label = label;
  int k = 0;
  if (label.size() >= 3) k = label.back() - '0';
  if (k < 1 || k > 3)
    throw config_error(fmt::format("unknown preset '{}' (expected one of H.1-H.3, IH1.1-IH1.3, IH2.1-IH2.3)", label));
  const std::string stem = label.substr(0, label.size() - 2);
  c.cov = {phi_for_index(k), 2.0};
  if (stem == "H") {
    c.scenario_class = ScenarioClass::homogeneous;
    c.mean.kind = MeanKind::constant;
    c.mean.expected_count = 1000.0;
  } else if (stem == "IH1") {
    c.scenario_class = ScenarioClass::ih1;
    c.mean.kind = MeanKind::linear;
    c.mean.intercept = -7.0753;
    c.mean.coef_x = -0.0018;
    c.mean.coef_y = 0.0026;
    c.bandwidth = k == 1 ? 270.0 : k == 2 ? 285.0 : 325.0;
  } else if (stem == "IH2") {
    c.scenario_class = ScenarioClass::ih2;
    c.mean.kind = MeanKind::synthetic_covariates;
    c.mean.expected_count = 1000.0;
    c.mean.anchors = 10;
    c.mean.polyline = default_ring();
    c.mean.coefficients = {-0.392, -1.075};
    c.corruption.partition = PartitionKind::tessellation;
    c.corruption.cells = 328;
  } else {
    throw config_error(fmt::format("unknown preset '{}'", label));
  }
  return c;
}

ScenarioConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw config_error(fmt::format("config: YAML parse error: {}", e.what()));
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  check_keys(root, "config",
             {"preset", "label", "class", "window", "simulation_grid", "mean",
              "covariance", "replications", "seed", "workers", "corruption", "methods",
              "jitter_radius", "delta", "r_max", "r_nodes", "intensity", "bounds",
              "optimizer"});

  ScenarioConfig c = root["preset"] ? preset(get<std::string>(root["preset"], "preset"))
                                    : ScenarioConfig{};
  if (root["label"]) c.label = get<std::string>(root["label"], "label");
  if (root["class"]) {
    const auto s = get<std::string>(root["class"], "class");
    if (s == "homogeneous") c.scenario_class = ScenarioClass::homogeneous;
    else if (s == "ih1") c.scenario_class = ScenarioClass::ih1;
    else if (s == "ih2") c.scenario_class = ScenarioClass::ih2;
    else throw config_error(fmt::format("config: unknown class '{}'", s));
  }
  if (root["window"]) c.window = parse_window(root["window"]);
  if (root["simulation_grid"]) {
    const auto g = get_pair(root["simulation_grid"], "simulation_grid");
    c.sim_nx = g[0];
    c.sim_ny = g[1];
  }
  if (const auto m = root["mean"]) {
    check_keys(m, "mean", {"type", "expected_count", "value", "intercept", "coef_x",
                           "coef_y", "anchors", "polyline", "coefficients", "min_distance"});
    if (m["type"]) {
      const auto t = get<std::string>(m["type"], "mean.type");
      if (t == "constant") c.mean.kind = MeanKind::constant;
      else if (t == "linear") c.mean.kind = MeanKind::linear;
      else if (t == "synthetic_covariates") c.mean.kind = MeanKind::synthetic_covariates;
      else throw config_error(fmt::format("config: unknown mean type '{}'", t));
    }
    if (m["expected_count"]) c.mean.expected_count = get<double>(m["expected_count"], "mean.expected_count");
    if (m["value"]) {
      c.mean.value = get<double>(m["value"], "mean.value");
      if (!m["expected_count"]) c.mean.expected_count = 0.0;
    }
    if (m["intercept"]) c.mean.intercept = get<double>(m["intercept"], "mean.intercept");
    if (m["coef_x"]) c.mean.coef_x = get<double>(m["coef_x"], "mean.coef_x");
    if (m["coef_y"]) c.mean.coef_y = get<double>(m["coef_y"], "mean.coef_y");
    if (m["anchors"]) c.mean.anchors = get<int>(m["anchors"], "mean.anchors");
    if (m["polyline"]) c.mean.polyline = get_points(m["polyline"], "mean.polyline");
    if (m["coefficients"]) {
      const auto v = get<std::vector<double>>(m["coefficients"], "mean.coefficients");
      if (v.size() != 2) throw config_error("config: mean.coefficients must have two entries");
      c.mean.coefficients = {v[0], v[1]};
    }
    if (m["min_distance"]) c.mean.min_distance = get<double>(m["min_distance"], "mean.min_distance");
  }
  if (const auto cv = root["covariance"]) {
    check_keys(cv, "covariance", {"phi", "sigma2"});
    if (cv["phi"]) c.cov.phi = get<double>(cv["phi"], "covariance.phi");
    if (cv["sigma2"]) c.cov.sigma2 = get<double>(cv["sigma2"], "covariance.sigma2");
  }
  if (root["replications"]) c.replications = get<int>(root["replications"], "replications");
  if (root["seed"]) c.seed = get<std::uint64_t>(root["seed"], "seed");
  if (root["workers"]) c.workers = get<int>(root["workers"], "workers");
  if (const auto co = root["corruption"]) {
    check_keys(co, "corruption", {"partition", "grid", "cells", "file", "fractions"});
    if (co["partition"]) {
      const auto p = get<std::string>(co["partition"], "corruption.partition");
      if (p == "grid") c.corruption.partition = PartitionKind::grid;
      else if (p == "tessellation") c.corruption.partition = PartitionKind::tessellation;
      else if (p == "file") c.corruption.partition = PartitionKind::file;
      else throw config_error(fmt::format("config: unknown partition '{}'", p));
    }
    if (co["grid"]) {
      const auto g = get_pair(co["grid"], "corruption.grid");
      c.corruption.nx = g[0];
      c.corruption.ny = g[1];
    }
    if (co["cells"]) c.corruption.cells = get<int>(co["cells"], "corruption.cells");
    if (co["file"]) c.corruption.file = get<std::string>(co["file"], "corruption.file");
    if (co["fractions"])
      c.corruption.fractions = get<std::vector<double>>(co["fractions"], "corruption.fractions");
  }
  if (root["methods"]) {
    c.methods.clear();
    for (const auto& s : get<std::vector<std::string>>(root["methods"], "methods"))
      c.methods.push_back(parse_method(s));
  }
  if (root["jitter_radius"]) c.jitter_radius = get<double>(root["jitter_radius"], "jitter_radius");
  if (root["delta"]) c.delta = rule_or_number(root["delta"], "delta");
  if (root["r_max"]) c.r_max = rule_or_number(root["r_max"], "r_max");
  if (root["r_nodes"]) c.r_nodes = get<int>(root["r_nodes"], "r_nodes");
  if (const auto in = root["intensity"]) {
    check_keys(in, "intensity", {"grid", "bandwidth", "pilot_bandwidth", "candidates"});
    if (in["grid"]) {
      const auto g = get_pair(in["grid"], "intensity.grid");
      c.intensity_nx = g[0];
      c.intensity_ny = g[1];
    }
    if (in["bandwidth"]) c.bandwidth = get<double>(in["bandwidth"], "intensity.bandwidth");
    if (in["pilot_bandwidth"])
      c.pilot_bandwidth = get<double>(in["pilot_bandwidth"], "intensity.pilot_bandwidth");
    if (in["candidates"]) {
      if (in["candidates"].IsScalar() && in["candidates"].Scalar() == "default")
        c.bandwidth_candidates.clear();
      else
        c.bandwidth_candidates = get<std::vector<double>>(in["candidates"], "intensity.candidates");
    }
  }
  if (const auto b = root["bounds"]) {
    check_keys(b, "bounds", {"phi", "sigma2"});
    if (b["phi"]) {
      const auto v = get<std::vector<double>>(b["phi"], "bounds.phi");
      if (v.size() != 2) throw config_error("config: bounds.phi must be [lo, hi]");
      c.bounds.phi_lo = v[0];
      c.bounds.phi_hi = v[1];
    }
    if (b["sigma2"]) {
      const auto v = get<std::vector<double>>(b["sigma2"], "bounds.sigma2");
      if (v.size() != 2) throw config_error("config: bounds.sigma2 must be [lo, hi]");
      c.bounds.sigma2_lo = v[0];
      c.bounds.sigma2_hi = v[1];
    }
  }
  if (const auto o = root["optimizer"]) {
    check_keys(o, "optimizer", {"max_iterations", "tolerance"});
    if (o["max_iterations"]) c.optimizer.max_iterations = get<int>(o["max_iterations"], "optimizer.max_iterations");
    if (o["tolerance"]) c.optimizer.tolerance = get<double>(o["tolerance"], "optimizer.tolerance");
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error(fmt::format("cannot open config '{}'", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_yaml(const ScenarioConfig& c) {
  YAML::Node root(YAML::NodeType::Map);
  root["label"] = c.label;
  root["class"] = class_name(c.scenario_class);
  if (c.window.is_rectangle()) {
    YAML::Node w(YAML::NodeType::Sequence);
    const Box& b = c.window.bounds();
    for (double v : {b.xmin, b.xmax, b.ymin, b.ymax}) w.push_back(num(v));
    w.SetStyle(YAML::EmitterStyle::Flow);
    root["window"] = w;
  } else {
    root["window"]["polygon"] = points_node(c.window.ring());
  }
  YAML::Node sg(YAML::NodeType::Sequence);
  sg.push_back(c.sim_nx);
  sg.push_back(c.sim_ny);
  sg.SetStyle(YAML::EmitterStyle::Flow);
  root["simulation_grid"] = sg;

  YAML::Node m(YAML::NodeType::Map);
  m["type"] = mean_kind_name(c.mean.kind);
  switch (c.mean.kind) {
    case MeanKind::constant:
      if (c.mean.expected_count > 0.0) m["expected_count"] = num(c.mean.expected_count);
      else m["value"] = num(c.mean.value);
      break;
    case MeanKind::linear:
      m["intercept"] = num(c.mean.intercept);
      m["coef_x"] = num(c.mean.coef_x);
      m["coef_y"] = num(c.mean.coef_y);
      break;
    case MeanKind::synthetic_covariates:
      m["expected_count"] = num(c.mean.expected_count);
      m["anchors"] = c.mean.anchors;
      m["polyline"] = points_node(c.mean.polyline);
      m["coefficients"] = flow_pair(c.mean.coefficients[0], c.mean.coefficients[1]);
      m["min_distance"] = num(c.mean.min_distance);
      break;
  }
  root["mean"] = m;
  root["covariance"]["phi"] = num(c.cov.phi);
  root["covariance"]["sigma2"] = num(c.cov.sigma2);
  root["replications"] = c.replications;
  root["seed"] = c.seed;
  root["workers"] = c.workers;

  YAML::Node co(YAML::NodeType::Map);
  co["partition"] = partition_name(c.corruption.partition);
  if (c.corruption.partition == PartitionKind::grid) {
    YAML::Node g(YAML::NodeType::Sequence);
    g.push_back(c.corruption.nx);
    g.push_back(c.corruption.ny);
    g.SetStyle(YAML::EmitterStyle::Flow);
    co["grid"] = g;
  } else if (c.corruption.partition == PartitionKind::tessellation) {
    co["cells"] = c.corruption.cells;
  } else {
    co["file"] = c.corruption.file;
  }
  YAML::Node fr(YAML::NodeType::Sequence);
  for (double f : c.corruption.fractions) fr.push_back(num(f));
  fr.SetStyle(YAML::EmitterStyle::Flow);
  co["fractions"] = fr;
  root["corruption"] = co;

  YAML::Node ms(YAML::NodeType::Sequence);
  for (Method x : c.methods) ms.push_back(std::string(method_name(x)));
  ms.SetStyle(YAML::EmitterStyle::Flow);
  root["methods"] = ms;
  root["jitter_radius"] = num(c.jitter_radius);
  if (c.delta < 0.0) root["delta"] = "rule";
  else root["delta"] = num(c.delta);
  if (c.r_max <= 0.0) root["r_max"] = "rule";
  else root["r_max"] = num(c.r_max);
  root["r_nodes"] = c.r_nodes;

  YAML::Node in(YAML::NodeType::Map);
  YAML::Node ig(YAML::NodeType::Sequence);
  ig.push_back(c.intensity_nx);
  ig.push_back(c.intensity_ny);
  ig.SetStyle(YAML::EmitterStyle::Flow);
  in["grid"] = ig;
  in["bandwidth"] = num(c.bandwidth);
  in["pilot_bandwidth"] = num(c.pilot_bandwidth);
  if (c.bandwidth_candidates.empty()) {
    in["candidates"] = "default";
  } else {
    YAML::Node cand(YAML::NodeType::Sequence);
    for (double h : c.bandwidth_candidates) cand.push_back(num(h));
    cand.SetStyle(YAML::EmitterStyle::Flow);
    in["candidates"] = cand;
  }
  root["intensity"] = in;
  root["bounds"]["phi"] = flow_pair(c.bounds.phi_lo, c.bounds.phi_hi);
  root["bounds"]["sigma2"] = flow_pair(c.bounds.sigma2_lo, c.bounds.sigma2_hi);
  root["optimizer"]["max_iterations"] = c.optimizer.max_iterations;
  root["optimizer"]["tolerance"] = num(c.optimizer.tolerance);

  YAML::Emitter out;
  out << root;
  return std::string(out.c_str()) + "\n";
}

}  // namespace dupcox
