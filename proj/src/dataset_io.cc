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

#include "latentlab/dataset_io.h"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>

#include "latentlab/error.h"
#include "latentlab/file_util.h"
#include "little_endian.h"

namespace latentlab {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kPointBytes = 16;
constexpr std::uint32_t kMaxLabelField = 0xFFFF;

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

double ParseCalibNumber(const std::string& token, const std::string& key) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kParse,
                "non-numeric token '" + token + "' in calibration row " + key);
  }
  return value;
}

}  // namespace

PointCloud ReadScan(const fs::path& path) {
  const std::string bytes = ReadFileBytes(path);
  if (bytes.size() % kPointBytes != 0) {
    throw Error(ErrorCode::kMalformedScan,
                path.string() + " has " + std::to_string(bytes.size()) +
                    " bytes, not a multiple of 16");
  }
  PointCloud cloud;
  cloud.points.resize(bytes.size() / kPointBytes);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const std::size_t base = i * kPointBytes;
    Point& p = cloud.points[i];
    p.x = internal::LoadF32(bytes, base);
    p.y = internal::LoadF32(bytes, base + 4);
    p.z = internal::LoadF32(bytes, base + 8);
    p.b = internal::LoadF32(bytes, base + 12);
  }
  return cloud;
}

void WriteScan(const fs::path& path, const PointCloud& cloud) {
  std::string bytes;
  bytes.reserve(cloud.points.size() * kPointBytes);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point& p = cloud.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.b)) {
      throw Error(ErrorCode::kInvalidPoint,
                  "point " + std::to_string(i) + " is not finite");
    }
    internal::AppendF32(&bytes, p.x);
    internal::AppendF32(&bytes, p.y);
    internal::AppendF32(&bytes, p.z);
    internal::AppendF32(&bytes, p.b);
  }
  WriteFileAtomic(path, bytes);
}

std::uint32_t PackLabel(const PointLabel& label) {
  if (label.sem > kMaxLabelField || label.inst > kMaxLabelField) {
    throw Error(ErrorCode::kOverflow,
                "label (" + std::to_string(label.sem) + ", " +
                    std::to_string(label.inst) + ") does not fit 16 bits");
  }
  return label.sem | (label.inst << 16);
}

PointLabel UnpackLabel(std::uint32_t value) {
  return PointLabel{value & 0xFFFFu, value >> 16};
}

std::vector<PointLabel> ReadLabels(const fs::path& path,
                                   std::size_t n_points) {
  const std::string bytes = ReadFileBytes(path);
  if (bytes.size() != n_points * 4) {
    throw Error(ErrorCode::kLabelMismatch,
                path.string() + " holds " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(n_points) +
                    " labels");
  }
  std::vector<PointLabel> labels(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    labels[i] = UnpackLabel(internal::LoadU32(bytes, 4 * i));
  }
  return labels;
}

void WriteLabels(const fs::path& path, std::span<const PointLabel> labels) {
  std::string bytes;
  bytes.reserve(labels.size() * 4);
  for (const PointLabel& label : labels) {
    internal::AppendU32(&bytes, PackLabel(label));
  }
  WriteFileAtomic(path, bytes);
}

CameraModel ReadCalibration(const fs::path& path, int view,
                            ImageSize image_size) {
  std::map<std::string, std::vector<std::string>> rows;
  for (const std::string& line : SplitLines(ReadFileBytes(path))) {
    std::istringstream in(line);
    std::string key;
    if (!(in >> key) || key.back() != ':') continue;
    key.pop_back();
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token) tokens.push_back(token);
    rows[key] = std::move(tokens);
  }

  auto matrix_row = [&](const std::string& key) {
    auto it = rows.find(key);
    if (it == rows.end()) {
      throw Error(ErrorCode::kMissingCalibration,
                  path.string() + " has no '" + key + ":' row");
    }
    if (it->second.size() != 12) {
      throw Error(ErrorCode::kParse,
                  "calibration row " + key + " has " +
                      std::to_string(it->second.size()) +
                      " values, expected 12");
    }
    Matrix3x4 m{};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        m[r][c] = ParseCalibNumber(it->second[r * 4 + c], key);
      }
    }
    return m;
  };

  CameraModel camera;
  camera.view_id = view;
  camera.image_size = image_size;
  camera.intrinsic = matrix_row("P" + std::to_string(view));
  const Matrix3x4 tr = matrix_row("Tr");
  for (int r = 0; r < 3; ++r) camera.extrinsic[r] = tr[r];
  camera.extrinsic[3] = {0.0, 0.0, 0.0, 1.0};
  camera.Validate();
  return camera;
}

void WriteCalibration(const fs::path& path, const CameraModel& camera) {
  auto format_row = [](const std::string& key, auto rows) {
    std::ostringstream out;
    out.precision(17);
    out << key << ":";
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) out << ' ' << rows[r][c];
    }
    out << '\n';
    return out.str();
  };
  std::string text = format_row("P" + std::to_string(camera.view_id),
                                camera.intrinsic);
  text += format_row("Tr", camera.extrinsic);
  WriteFileAtomic(path, text);
}

std::size_t SplitStride(double ratio) {
  if (!(ratio > 0.0) || ratio > 1.0) {
    throw Error(ErrorCode::kInvalidRatio,
                "split ratio must be in (0, 1], got " + std::to_string(ratio));
  }
  const double stride = std::round(1.0 / ratio);
  return stride < 1.0 ? 1 : static_cast<std::size_t>(stride);
}

SplitManifest FixedIntervalSplit(std::span<const std::string> frames,
                                 double ratio) {
  const std::size_t stride = SplitStride(ratio);
  SplitManifest split;
  split.ratio = ratio;
  split.frames.assign(frames.begin(), frames.end());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    (i % stride == 0 ? split.labeled : split.unlabeled).push_back(frames[i]);
  }
  return split;
}

void WriteSplit(const fs::path& path, const SplitManifest& split) {
  const std::set<std::string> labeled_set(split.labeled.begin(),
                                           split.labeled.end());
  std::string text;
  for (const std::string& frame : split.frames) {
    const bool labeled = labeled_set.contains(frame);
    text += frame + (labeled ? "\tlabeled\n" : "\tunlabeled\n");
  }
  WriteFileAtomic(path, text);
}

SplitManifest ReadSplit(const fs::path& path) {
  SplitManifest split;
  for (const std::string& line : SplitLines(ReadFileBytes(path))) {
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = SplitTabs(line);
    if (fields.size() != 2 ||
        (fields[1] != "labeled" && fields[1] != "unlabeled")) {
      throw Error(ErrorCode::kParse, "bad split line '" + line + "'");
    }
    split.frames.push_back(fields[0]);
    (fields[1] == "labeled" ? split.labeled : split.unlabeled)
        .push_back(fields[0]);
  }
  split.ratio = split.frames.empty()
                    ? 1.0
                    : static_cast<double>(split.labeled.size()) /
                          static_cast<double>(split.frames.size());
  return split;
}

TrainingManifest SelfTrainingManifest(const SplitManifest& split,
                                      const fs::path& gt_dir,
                                      const fs::path& pseudo_dir) {
  const std::set<std::string> labeled_set(split.labeled.begin(),
                                           split.labeled.end());
  TrainingManifest manifest;
  for (const std::string& frame : split.frames) {
    TrainingEntry entry;
    entry.frame = frame;
    if (labeled_set.contains(frame)) {
      entry.kind = LabelKind::kGroundTruth;
      entry.label_path = gt_dir / (frame + ".label");
    } else {
      entry.kind = LabelKind::kPseudo;
      entry.label_path = pseudo_dir / (frame + ".label");
      std::error_code ec;
      if (!fs::is_regular_file(entry.label_path, ec)) {
        throw Error(ErrorCode::kMissingPseudo,
                    "no pseudo label for frame " + frame + " at " +
                        entry.label_path.string());
      }
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

std::string FormatManifest(const TrainingManifest& manifest) {
  std::string text;
  for (const TrainingEntry& e : manifest.entries) {
    text += e.frame + '\t' + e.label_path.string() + '\t' +
            (e.kind == LabelKind::kGroundTruth ? "ground_truth" : "pseudo") +
            '\n';
  }
  return text;
}

void WriteManifest(const fs::path& path, const TrainingManifest& manifest) {
  WriteFileAtomic(path, FormatManifest(manifest));
}

}  // namespace latentlab
