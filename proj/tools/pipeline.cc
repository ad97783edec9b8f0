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

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cli.h"
#include "latentlab/camera_projection.h"
#include "latentlab/cylinder_grid.h"
#include "latentlab/cylinder_mix.h"
#include "latentlab/dataset_io.h"
#include "latentlab/error.h"
#include "latentlab/file_util.h"
#include "latentlab/ipsl_heatmap.h"

namespace latentlab::cli {

namespace fs = std::filesystem;

namespace {

struct Layout {
  fs::path root;
  fs::path split() const { return root / "split.tsv"; }
  fs::path pairs() const { return root / "pairs.tsv"; }
  fs::path log() const { return root / "run.log"; }
  fs::path mixed(const std::string& name) const { return root / "mixed" / name; }
  fs::path voxels(const std::string& name) const {
    return root / "voxels" / (name + ".llt1");
  }
  fs::path mapping(const std::string& name) const {
    return root / "mapping" / (name + ".llt1");
  }
  fs::path boxes(const std::string& name) const {
    return root / "boxes" / (name + ".tsv");
  }
  fs::path heatmap(const std::string& name) const {
    return root / "heatmap" / (name + ".llt1");
  }
  fs::path stamp(const std::string& task) const {
    return root / "done" / (task + ".ok");
  }
};

std::vector<std::string> ListFrames(const fs::path& data_dir) {
  const fs::path scans = data_dir / "velodyne";
  if (!fs::is_directory(scans)) {
    throw Error(ErrorCode::kIo, "missing scan directory " + scans.string());
  }
  std::vector<std::string> frames;
  for (const auto& entry : fs::directory_iterator(scans)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") {
      frames.push_back(entry.path().stem().string());
    }
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

PointCloud LoadLabeledFrame(const fs::path& data_dir, const std::string& frame) {
  PointCloud cloud = ReadScan(data_dir / "velodyne" / (frame + ".bin"));
  cloud.labels = ReadLabels(data_dir / "labels" / (frame + ".label"), cloud.size());
  return cloud;
}

// Projection, boxes and heatmap of the points of cloud selected by rows.
// Mapping rows refer to indices in cloud.
void ImageStages(const PointCloud& cloud, const std::vector<std::uint32_t>& rows,
                 const std::string& name, const CameraModel& camera,
                 const PipelineConfig& config, const Layout& layout) {
  PointCloud subset;
  subset.points.reserve(rows.size());
  for (std::uint32_t r : rows) subset.points.push_back(cloud.points[r]);
  PixelMapping mapping = ProjectPoints(subset, camera);
  for (PixelPair& pair : mapping.pairs) pair.point_index = rows[pair.point_index];
  WriteTensor(layout.mapping(name), MappingToTensor(mapping));
  const std::vector<InstanceBox> boxes =
      InstanceBoxes(mapping, *cloud.labels, config.things, config.min_support);
  WriteBoxesTsv(layout.boxes(name), boxes);
  WriteTensor(layout.heatmap(name),
              ImageHeatmap(boxes, config.heatmap, camera.image_size).ToTensor());
}

std::string PairName(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pair_%04zu", k);
  return buf;
}

std::vector<std::uint32_t> AllRows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
  return rows;
}

void RunTasks(const std::vector<std::function<void()>>& tasks, int jobs) {
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_task = tasks.size();
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        // Report the lowest failing task so the diagnostic is deterministic.
        if (i < first_error_task) {
          first_error_task = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  const int threads =
      std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

void RunPipeline(const PipelineOptions& options, std::ostream& log) {
  const PipelineConfig& config = options.config;
  config.Validate();
  if (!config.seed) {
    throw Error(ErrorCode::kInvalidArgument, "pipeline needs a seed");
  }
  const Layout layout{options.out_dir};
  for (const char* sub : {"mixed", "voxels", "mapping", "boxes", "heatmap", "done"}) {
    fs::create_directories(layout.root / sub);
  }

  const std::vector<std::string> frames = ListFrames(options.data_dir);
  const SplitManifest split = FixedIntervalSplit(frames, config.split_ratio);
  WriteSplit(layout.split(), split);

  std::map<std::string, std::uint32_t> frame_ids;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frame_ids[frames[i]] = static_cast<std::uint32_t>(i);
  }

  ScanPairing pairing;
  if (split.labeled.size() >= 2) {
    pairing = PairScans(split.labeled, *config.seed);
  }

  const CameraModel camera = ReadCalibration(options.data_dir / "calib.txt",
                                             config.view, config.image_size);

  std::vector<std::function<void()>> tasks;
  auto add_task = [&](std::string name, std::function<void()> body) {
    tasks.push_back([name, body = std::move(body), &layout, &options] {
      if (options.resume && fs::exists(layout.stamp(name))) return;
      body();
      WriteFileAtomic(layout.stamp(name), name + "\n");
    });
  };

  for (const std::string& frame : split.labeled) {
    add_task("frame_" + frame, [&, frame] {
      const PointCloud cloud = LoadLabeledFrame(options.data_dir, frame);
      WriteTensor(layout.voxels(frame), VoxelTensor(VoxelizeFiltered(cloud, config.grid)));
      ImageStages(cloud, AllRows(cloud.size()), frame, camera, config, layout);
    });
  }

  std::string pairs_text;
  for (std::size_t k = 0; k < pairing.pairs.size(); ++k) {
    pairs_text += PairName(k) + '\t' + pairing.pairs[k].first + '\t' +
                  pairing.pairs[k].second + '\n';
  }
  if (pairing.leftover) pairs_text += "leftover\t" + *pairing.leftover + "\n";
  WriteFileAtomic(layout.pairs(), pairs_text);

  for (std::size_t k = 0; k < pairing.pairs.size(); ++k) {
    const std::string pair_name = PairName(k);
    add_task(pair_name, [&, k, pair_name] {
      const auto& [fa, fb] = pairing.pairs[k];
      MixSpec mix = config.mix;
      mix.seed = DeriveSeed(*config.seed, k);
      MixResult result =
          CylinderMix(LoadLabeledFrame(options.data_dir, fa),
                      LoadLabeledFrame(options.data_dir, fb), config.grid, mix,
                      frame_ids.at(fa), frame_ids.at(fb));
      int part = 1;
      for (PointCloud* cloud : {&result.first, &result.second}) {
        if (!cloud->provenance) {
          const std::uint32_t source = frame_ids.at(part == 1 ? fa : fb);
          cloud->provenance.emplace();
          for (std::uint32_t i = 0; i < cloud->size(); ++i) {
            cloud->provenance->push_back(Provenance{source, i});
          }
        }
        const std::string name = pair_name + "_" + std::to_string(part++);
        WriteScan(layout.mixed(name + ".bin"), *cloud);
        WriteLabels(layout.mixed(name + ".label"), *cloud->labels);
        std::string sidecar;
        std::map<std::uint32_t, std::vector<std::uint32_t>> rows_by_source;
        for (std::uint32_t i = 0; i < cloud->size(); ++i) {
          const Provenance& p = (*cloud->provenance)[i];
          sidecar += frames.at(p.source_frame) + ',' +
                     std::to_string(p.original_index) + '\n';
          rows_by_source[p.source_frame].push_back(i);
        }
        WriteFileAtomic(layout.mixed(name + ".prov"), sidecar);
        WriteTensor(layout.voxels(name),
                    VoxelTensor(VoxelizeFiltered(*cloud, config.grid)));
        // Each point is projected with the camera of the frame it came from.
        for (const auto& [source, rows] : rows_by_source) {
          ImageStages(*cloud, rows, name + "__" + frames.at(source), camera,
                      config, layout);
        }
      }
      WriteFileAtomic(layout.mixed(pair_name + ".status"),
                      result.mixed ? "mixed\n" : "unmixed\n");
    });
  }

  RunTasks(tasks, config.jobs);

  std::string run_log = config.Format();
  run_log += "frames = " + std::to_string(frames.size()) + "\n";
  run_log += "labeled = " + std::to_string(split.labeled.size()) + "\n";
  run_log += "pairs = " + std::to_string(pairing.pairs.size()) + "\n";
  WriteFileAtomic(layout.log(), run_log);
  log << "pipeline: " << frames.size() << " frames, " << split.labeled.size()
      << " labeled, " << pairing.pairs.size() << " pairs, " << tasks.size()
      << " tasks\n";
}

}  // namespace latentlab::cli
