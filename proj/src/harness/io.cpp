// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dupcox/error.hpp"
#include "dupcox/io.hpp"

namespace dupcox {
namespace {

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < s.size() && (s[used] == ' ' || s[used] == '\t')) ++used;
  if (used == 0 || used != s.size())
    throw io_error(fmt::format("{}: '{}' is not a number", what, s));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

Window parse_window_spec(const std::string& spec) {
  const auto parts = split(spec, ',');
  if (parts.size() != 4)
    throw config_error(fmt::format("window '{}': expected xmin,xmax,ymin,ymax", spec));
  try {
    return Window::rectangle(parse_double(parts[0], "window"), parse_double(parts[1], "window"),
                             parse_double(parts[2], "window"), parse_double(parts[3], "window"));
  } catch (const Error& e) {
    throw config_error(e.what());
  }
}

Window read_window_file(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw io_error(fmt::format("cannot open window file '{}'", path));
  } catch (const YAML::Exception& e) {
    throw io_error(fmt::format("window file '{}': {}", path, e.what()));
  }
  const YAML::Node w = root["window"];
  if (!w) throw config_error(fmt::format("window file '{}': missing 'window'", path));
  try {
    if (w.IsSequence() && w.size() == 4)
      return Window::rectangle(w[0].as<double>(), w[1].as<double>(), w[2].as<double>(),
                               w[3].as<double>());
    if (w.IsMap() && w["polygon"]) {
      std::vector<Point> ring;
      for (const auto& p : w["polygon"]) ring.push_back({p[0].as<double>(), p[1].as<double>()});
      return Window::polygon(std::move(ring));
    }
  } catch (const YAML::Exception& e) {
    throw config_error(fmt::format("window file '{}': {}", path, e.what()));
  }
  throw config_error(fmt::format("window file '{}': malformed 'window'", path));
}

void write_window_file(const std::string& path, const Window& window) {
  std::ofstream f(path);
  if (!f) throw io_error(fmt::format("cannot open '{}' for writing", path));
  if (window.is_rectangle()) {
    const Box& b = window.bounds();
    f << fmt::format("window: [{}, {}, {}, {}]\n", b.xmin, b.xmax, b.ymin, b.ymax);
  } else {
    f << "window:\n  polygon:\n";
    for (const Point& p : window.ring()) f << fmt::format("    - [{}, {}]\n", p.x, p.y);
  }
  if (!f) throw io_error(fmt::format("write to '{}' failed", path));
}

std::string window_sidecar_path(const std::string& points_path) {
  std::filesystem::path p(points_path);
  p.replace_extension(".window.yaml");
  return p.string();
}

void write_points_csv(std::ostream& out, const PointPattern& pattern) {
  out << "x,y\n";
  for (const Point& p : pattern.points()) out << fmt::format("{},{}\n", p.x, p.y);
}

void write_points_csv(const std::string& path, const PointPattern& pattern) {
  std::ofstream f(path);
  if (!f) throw io_error(fmt::format("cannot open '{}' for writing", path));
  write_points_csv(f, pattern);
  if (!f) throw io_error(fmt::format("write to '{}' failed", path));
}

PointPattern read_points_csv(std::istream& in, const Window& window) {
  std::string line;
  std::size_t lineno = 0;
  do {
    if (!std::getline(in, line)) throw io_error("points csv: empty input");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  } while (!line.empty() && line[0] == '#');
  if (line != "x,y") throw io_error(fmt::format("points csv: expected header 'x,y', got '{}'", line));
  std::vector<Point> pts;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 2)
      throw io_error(fmt::format("points csv line {}: expected two fields", lineno));
    const Point p{parse_double(parts[0], fmt::format("points csv line {}", lineno)),
                  parse_double(parts[1], fmt::format("points csv line {}", lineno))};
    if (!window.contains(p))
      throw config_error(fmt::format("points csv line {}: ({}, {}) lies outside {}", lineno,
                                     p.x, p.y, window.describe()));
    pts.push_back(p);
  }
  return PointPattern(window, std::move(pts));
}

PointPattern read_points_csv(const std::string& path, const Window& window) {
  std::ifstream f(path);
  if (!f) throw io_error(fmt::format("cannot open '{}'", path));
  return read_points_csv(f, window);
}

}  // namespace dupcox
