// Copyright 2026 The LatentLab Authors.
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

#include "latentlab/config.h"

#include <charconv>
#include <sstream>
#include <string>

#include "latentlab/error.h"
#include "latentlab/file_util.h"

namespace latentlab {
namespace {

std::string_view Trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitCommas(std::string_view text) {
  std::vector<std::string_view> parts;
  if (Trim(text).empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(Trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

bool ParseBool(std::string_view text) {
  text = Trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error(ErrorCode::kParse, "expected a boolean, got '" + std::string(text) + "'");
}

template <typename T>
std::string JoinList(const T& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out += FormatDouble(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

template <std::size_t N, typename T>
std::vector<T> ExpectCount(std::vector<T> values, std::string_view key) {
  if (values.size() != N) {
    throw Error(ErrorCode::kParse, std::string(key) + " needs " +
                                       std::to_string(N) + " comma-separated values");
  }
  return values;
}

}  // namespace

std::set<std::uint32_t> DefaultThingClasses() {
  // car, bicycle, bus, motorcycle, on-rails, truck, other-vehicle, person,
  // bicyclist, motorcyclist, and their moving counterparts.
  return {10,  11,  13,  15,  16,  18,  20,  30,  31, 32,
          252, 253, 254, 255, 256, 257, 258, 259};
}

double ParseDouble(std::string_view text) {
  text = Trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParse, "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

std::int64_t ParseInt(std::string_view text) {
  text = Trim(text);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParse, "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> ParseDoubleList(std::string_view text) {
  std::vector<double> values;
  for (std::string_view part : SplitCommas(text)) values.push_back(ParseDouble(part));
  return values;
}

std::vector<int> ParseIntList(std::string_view text) {
  std::vector<int> values;
  for (std::string_view part : SplitCommas(text)) {
    values.push_back(static_cast<int>(ParseInt(part)));
  }
  return values;
}

std::set<std::uint32_t> ParseClassSet(std::string_view text) {
  std::set<std::uint32_t> classes;
  for (std::string_view part : SplitCommas(text)) {
    const std::int64_t v = ParseInt(part);
    if (v < 0 || v > 0xFFFF) {
      throw Error(ErrorCode::kParse, "class id out of range: " + std::string(part));
    }
    classes.insert(static_cast<std::uint32_t>(v));
  }
  return classes;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void PipelineConfig::Set(std::string_view key, std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  if (key == "grid") {
    auto v = ExpectCount<3>(ParseIntList(value), key);
    grid.grid = GridDims{v[0], v[1], v[2]};
  } else if (key == "bounds") {
    auto v = ExpectCount<4>(ParseDoubleList(value), key);
    grid.rho_min = v[0];
    grid.rho_max = v[1];
    grid.z_min = v[2];
    grid.z_max = v[3];
  } else if (key == "drop_out_of_bounds") {
    grid.drop_out_of_bounds = ParseBool(value);
  } else if (key == "regions") {
    auto v = ExpectCount<3>(ParseIntList(value), key);
    mix.regions = RegionSize{v[0], v[1], v[2]};
  } else if (key == "p_cylmix") {
    mix.p_cylmix = ParseDouble(value);
  } else if (key == "seed") {
    if (value == "unset") {
      seed.reset();
    } else {
      const std::int64_t s = ParseInt(value);
      if (s < 0) throw Error(ErrorCode::kParse, "seed must be non-negative");
      seed = static_cast<std::uint64_t>(s);
    }
    mix.seed = seed.value_or(0);
  } else if (key == "r_corner") {
    heatmap.r_corner = ParseDouble(value);
  } else if (key == "p_center") {
    heatmap.p_center = ParseDouble(value);
  } else if (key == "r_center_floor") {
    heatmap.r_center_floor = ParseDouble(value);
  } else if (key == "center_threshold") {
    decode.center_threshold = ParseDouble(value);
  } else if (key == "nms_kernel") {
    decode.nms_kernel = static_cast<int>(ParseInt(value));
  } else if (key == "top_k") {
    decode.top_k = static_cast<int>(ParseInt(value));
  } else if (key == "loss_weights") {
    auto v = ExpectCount<3>(ParseDoubleList(value), key);
    loss = LossWeights{v[0], v[1], v[2]};
  } else if (key == "split_ratio") {
    split_ratio = ParseDouble(value);
  } else if (key == "image_size") {
    auto v = ExpectCount<2>(ParseIntList(value), key);
    image_size = ImageSize{v[0], v[1]};
  } else if (key == "view") {
    view = static_cast<int>(ParseInt(value));
  } else if (key == "min_support") {
    const std::int64_t s = ParseInt(value);
    if (s < 0) throw Error(ErrorCode::kParse, "min_support must be non-negative");
    min_support = static_cast<std::uint32_t>(s);
  } else if (key == "things") {
    things = ParseClassSet(value);
  } else if (key == "jobs") {
    jobs = static_cast<int>(ParseInt(value));
  } else {
    throw Error(ErrorCode::kParse, "unknown config key '" + std::string(key) + "'");
  }
}

void PipelineConfig::Validate() const {
  grid.Validate();
  mix.Validate(grid.grid);
  heatmap.Validate();
  decode.Validate();
  loss.Validate();
  if (!(split_ratio > 0.0 && split_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidRatio, "split ratio must be in (0, 1]");
  }
  if (image_size.height < 1 || image_size.width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (jobs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "jobs must be >= 1");
  }
}

std::map<std::string, std::string> PipelineConfig::Entries() const {
  std::map<std::string, std::string> e;
  e["grid"] = JoinList(std::vector<int>{grid.grid.x, grid.grid.y, grid.grid.z});
  e["bounds"] = JoinList(
      std::vector<double>{grid.rho_min, grid.rho_max, grid.z_min, grid.z_max});
  e["drop_out_of_bounds"] = grid.drop_out_of_bounds ? "true" : "false";
  e["regions"] = JoinList(
      std::vector<int>{mix.regions.x, mix.regions.y, mix.regions.z});
  e["p_cylmix"] = FormatDouble(mix.p_cylmix);
  e["seed"] = seed ? std::to_string(*seed) : "unset";
  e["r_corner"] = FormatDouble(heatmap.r_corner);
  e["p_center"] = FormatDouble(heatmap.p_center);
  e["r_center_floor"] = FormatDouble(heatmap.r_center_floor);
  e["center_threshold"] = FormatDouble(decode.center_threshold);
  e["nms_kernel"] = std::to_string(decode.nms_kernel);
  e["top_k"] = std::to_string(decode.top_k);
  e["loss_weights"] =
      JoinList(std::vector<double>{loss.mu_hm, loss.mu_os, loss.mu_fm});
  e["split_ratio"] = FormatDouble(split_ratio);
  e["image_size"] =
      JoinList(std::vector<int>{image_size.height, image_size.width});
  e["view"] = std::to_string(view);
  e["min_support"] = std::to_string(min_support);
  e["things"] = JoinList(things);
  e["jobs"] = std::to_string(jobs);
  return e;
}

std::string PipelineConfig::Format() const {
  std::string out;
  for (const auto& [key, value] : Entries()) out += key + " = " + value + "\n";
  return out;
}

PipelineConfig ParseConfig(std::string_view text, PipelineConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = Trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse,
                  "config line " + std::to_string(line_no) + " lacks '='");
    }
    try {
      base.Set(view.substr(0, eq), view.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(),
                  "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

PipelineConfig LoadConfig(const std::filesystem::path& path,
                          PipelineConfig base) {
  return ParseConfig(ReadFileBytes(path), std::move(base));
}

}  // namespace latentlab
