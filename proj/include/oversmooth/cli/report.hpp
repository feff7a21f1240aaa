// Copyright 2026 The oversmooth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oversmooth/core/grid.hpp"

namespace oversmooth::cli {

inline constexpr std::string_view kVersion = "0.1.0";

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::span<const std::uint8_t> bytes);

struct FileDigest {
  std::string path;
  std::string sha256;
};

/// Machine-readable command report. Serializes with sorted keys, so equal
/// inputs give byte-identical text.
struct Report {
  std::string command;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  std::string to_json() const;
};

// ---------------------------------------------------------------------------
// SVG figures. Heatmaps use a fixed five-stop ramp
// #440154 -> #3b528b -> #21918c -> #5ec962 -> #fde725 (low to high).

std::array<std::uint8_t, 3> ramp_color(double t);
std::string xml_escape(std::string_view text);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string line_chart(std::string_view title, std::string_view x_label, std::string_view y_label,
                       const std::vector<Series>& series);

struct HeatPanel {
  std::string title;
  /// values(row, col): rows run along the vertical axis, bottom to top.
  Grid values;
  std::string x_label;
  std::string y_label;
  /// Axis extents; defaults to cell indices.
  std::optional<std::array<double, 2>> x_range;
  std::optional<std::array<double, 2>> y_range;
};

/// Panels side by side, each with its own colour bar.
std::string heatmap(std::string_view title, const std::vector<HeatPanel>& panels);

struct BarPanel {
  std::string y_label;
  /// One value per category; missing values leave a gap.
  std::vector<std::optional<double>> values;
};

/// Panels stacked vertically; bar colours identify categories in the legend.
std::string bar_chart(std::string_view title, const std::vector<std::string>& categories,
                      const std::vector<BarPanel>& panels);

}  // namespace oversmooth::cli
