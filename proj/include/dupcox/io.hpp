// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

#include "dupcox/geometry.hpp"

namespace dupcox {

/// "xmin,xmax,ymin,ymax".
Window parse_window_spec(const std::string& spec);

/// Window sidecar: a YAML document with `window: [xmin, xmax, ymin, ymax]`
/// or `window: {polygon: [[x, y], ...]}`.
Window read_window_file(const std::string& path);
void write_window_file(const std::string& path, const Window& window);
/// pts.csv -> pts.window.yaml
std::string window_sidecar_path(const std::string& points_path);

/// CSV with header `x,y`. Leading lines starting with # are comments.
void write_points_csv(std::ostream& out, const PointPattern& pattern);
void write_points_csv(const std::string& path, const PointPattern& pattern);
PointPattern read_points_csv(std::istream& in, const Window& window);
PointPattern read_points_csv(const std::string& path, const Window& window);

}  // namespace dupcox
