// Copyright 2026 The rydprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace rydprep::cli {

// %.12g for floats.
std::string format_number(double v);

using Cell = std::variant<double, long long, std::string>;

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::vector<Cell> row);
  std::string str() const;
  void write(const std::filesystem::path& path) const;
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Index of a column, or -1.
  int column(const std::string& name) const;
};

// Throws ConfigError for malformed input (ragged rows, missing header).
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 640;
  int height = 420;
};

// Self-contained SVG line plot with axes, ticks and a legend.
std::string render_svg(const PlotSpec& spec);

// Builds a plot from a result CSV. `panel` picks the x axis: "cycle" or
// "time". Every column that is not a key column becomes a series; with
// `group` set, each distinct value of that column gets its own series.
PlotSpec plot_from_csv(const CsvTable& table, const std::string& panel, const std::string& group,
                       const std::string& title);

}  // namespace rydprep::cli
