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

#include "cli.h"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latentlab/bev_pool.h"
#include "latentlab/camera_projection.h"
#include "latentlab/cylinder_grid.h"
#include "latentlab/cylinder_mix.h"
#include "latentlab/dataset_io.h"
#include "latentlab/error.h"
#include "latentlab/file_util.h"
#include "latentlab/ipsl_heatmap.h"
#include "latentlab/metrics.h"
#include "latentlab/panoptic_decode.h"
#include "latentlab/tensor.h"

namespace latentlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for flag combinations CLI11 cannot express; reported like a CLI11
// parse error (exit status 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags that shadow PipelineConfig keys. Values given on the command line
// override the --config file, which overrides the built-in defaults.
class ConfigFlags {
 public:
  void Bind(CLI::App* app, const std::string& flag, const std::string& key,
            const std::string& help) {
    std::string& slot = values_[key];
    CLI::Option* opt = app->add_option(flag, slot, help);
    bound_.emplace_back(opt, key);
  }

  PipelineConfig Resolve(const std::string& config_path) const {
    PipelineConfig config;
    if (const char* env = std::getenv("LATENTLAB_JOBS"); env && *env) {
      config.Set("jobs", env);
    }
    if (!config_path.empty()) config = LoadConfig(config_path, config);
    for (const auto& [opt, key] : bound_) {
      if (opt->count() > 0) config.Set(key, values_.at(key));
    }
    config.Validate();
    return config;
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::pair<CLI::Option*, std::string>> bound_;
};

void EchoConfig(const std::string& command, const PipelineConfig& config,
                std::ostream& err) {
  err << "# latentlab " << command << ":";
  for (const auto& [key, value] : config.Entries()) {
    err << ' ' << key << '=' << value;
  }
  err << '\n';
}

std::uint64_t RequireSeed(const PipelineConfig& config,
                          const std::string& command) {
  if (!config.seed) {
    throw UsageError(command + " is stochastic and needs --seed (or seed = ...)");
  }
  return *config.seed;
}

std::string Join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t v : values) {
    if (!out.empty()) out += ',';
    out += std::to_string(v);
  }
  return out;
}

std::vector<std::string> ReadFrameList(const fs::path& path) {
  std::vector<std::string> frames;
  std::istringstream in(ReadFileBytes(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) frames.push_back(line);
  }
  return frames;
}

std::string FrameName(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

std::vector<PointLabel> ReadLabelFile(const fs::path& path) {
  const auto bytes = fs::file_size(path);
  if (bytes % 4 != 0) {
    throw Error(ErrorCode::kLabelMismatch,
                path.string() + " is not a whole number of labels");
  }
  return ReadLabels(path, static_cast<std::size_t>(bytes / 4));
}

std::string ProvenanceSidecar(const PointCloud& cloud,
                              const std::vector<std::string>& names) {
  std::string text;
  for (const Provenance& p : *cloud.provenance) {
    text += names.at(p.source_frame) + ',' + std::to_string(p.original_index) +
            '\n';
  }
  return text;
}

PointCloud WithProvenance(PointCloud cloud, std::uint32_t source) {
  if (!cloud.provenance) {
    cloud.provenance.emplace(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      (*cloud.provenance)[i] = Provenance{source, static_cast<std::uint32_t>(i)};
    }
  }
  return cloud;
}

// Panoptic labels from a SemanticKITTI .label file or a 2 x H x W LLT1 map.
PanopticMap ReadPanoptic(const fs::path& path) {
  if (path.extension() == ".llt1") return PanopticMap::FromTensor(ReadTensor(path));
  const std::vector<PointLabel> labels = ReadLabelFile(path);
  PanopticMap map(1, static_cast<int>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    map.sem[i] = labels[i].sem;
    map.inst[i] = labels[i].inst;
  }
  return map;
}

std::vector<VoxelIndex> IndicesFromTensor(const Tensor& t) {
  if (t.rank() != 2 || t.dim(1) != 3) {
    throw Error(ErrorCode::kShape, "voxel indices must be an N x 3 tensor");
  }
  std::vector<VoxelIndex> out(t.dim(0));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = VoxelIndex{static_cast<std::int32_t>(t.data[3 * i]),
                        static_cast<std::int32_t>(t.data[3 * i + 1]),
                        static_cast<std::int32_t>(t.data[3 * i + 2])};
  }
  return out;
}

}  // namespace

Tensor VoxelTensor(const std::vector<std::optional<VoxelIndex>>& indices) {
  Tensor t({static_cast<std::uint32_t>(indices.size()), 3});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& v = indices[i];
    t.data[3 * i] = v ? static_cast<float>(v->x) : -1.0f;
    t.data[3 * i + 1] = v ? static_cast<float>(v->y) : -1.0f;
    t.data[3 * i + 2] = v ? static_cast<float>(v->z) : -1.0f;
  }
  return t;
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"latentlab: point-cloud latent label data engine"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file")
      ->check(CLI::ExistingFile);

  // split
  CLI::App* split = app.add_subcommand("split", "Fixed-interval labeled/unlabeled split");
  ConfigFlags split_flags;
  std::size_t frame_count = 0;
  std::string frame_list, split_out;
  auto* frames_opt = split->add_option("--frames", frame_count, "Number of frames (ids 000000...)");
  auto* list_opt = split->add_option("--frame-list", frame_list, "File with one frame id per line");
  frames_opt->excludes(list_opt);
  split_flags.Bind(split, "--ratio", "split_ratio", "Labeled fraction in (0, 1]");
  split->add_option("--out", split_out, "Write the split as TSV");

  // manifest
  CLI::App* manifest = app.add_subcommand("manifest", "Self-training manifest from a split");
  std::string split_path, gt_dir, pseudo_dir, manifest_out;
  manifest->add_option("--split", split_path, "Split TSV")->required();
  manifest->add_option("--gt-dir", gt_dir, "Ground-truth label directory")->required();
  manifest->add_option("--pseudo-dir", pseudo_dir, "Pseudo-label directory")->required();
  manifest->add_option("--out", manifest_out, "Manifest TSV (stdout if omitted)");

  // mix
  CLI::App* mix = app.add_subcommand("mix", "Cylinder-Mix two labeled scans");
  ConfigFlags mix_flags;
  std::string scan_a, labels_a, scan_b, labels_b, mix_out, frame_a, frame_b;
  mix->add_option("--scan-a", scan_a)->required();
  mix->add_option("--labels-a", labels_a)->required();
  mix->add_option("--scan-b", scan_b)->required();
  mix->add_option("--labels-b", labels_b)->required();
  mix->add_option("--frame-a", frame_a, "Frame id of a (default: scan file stem)");
  mix->add_option("--frame-b", frame_b, "Frame id of b (default: scan file stem)");
  mix->add_option("--out-dir", mix_out)->required();
  mix_flags.Bind(mix, "--regions", "regions", "Mixture regions R_x,R_y,R_z");
  mix_flags.Bind(mix, "--p", "p_cylmix", "Probability of mixing");
  mix_flags.Bind(mix, "--seed", "seed", "RNG seed");
  mix_flags.Bind(mix, "--grid", "grid", "Grid bins G_x,G_y,G_z");
  mix_flags.Bind(mix, "--bounds", "bounds", "rho_min,rho_max,z_min,z_max");

  // voxelize
  CLI::App* voxelize = app.add_subcommand("voxelize", "Cylindrical voxel index per point");
  ConfigFlags vox_flags;
  std::string vox_scan, vox_out;
  bool drop = false;
  voxelize->add_option("--scan", vox_scan)->required();
  voxelize->add_option("--out", vox_out)->required();
  voxelize->add_flag("--drop-out-of-bounds", drop, "Write -1 rows instead of clamping");
  vox_flags.Bind(voxelize, "--grid", "grid", "Grid bins G_x,G_y,G_z");
  vox_flags.Bind(voxelize, "--bounds", "bounds", "rho_min,rho_max,z_min,z_max");

  // bevpool
  CLI::App* bevpool = app.add_subcommand("bevpool", "Per-voxel max pooling of point features");
  ConfigFlags bev_flags;
  std::string bev_features, bev_indices, bev_out, bev_layout = "4d";
  float bev_fill = 0.0f;
  bevpool->add_option("--features", bev_features, "N x C LLT1")->required();
  bevpool->add_option("--indices", bev_indices, "N x 3 LLT1")->required();
  bevpool->add_option("--out", bev_out)->required();
  bevpool->add_option("--layout", bev_layout, "4d (G_x,G_y,G_z,C) or 3d (G_x,G_y,G_z*C)")
      ->check(CLI::IsMember({"4d", "3d"}));
  bevpool->add_option("--fill", bev_fill, "Value of empty voxels");
  bev_flags.Bind(bevpool, "--grid", "grid", "Grid bins G_x,G_y,G_z");

  // project
  CLI::App* project = app.add_subcommand("project", "LiDAR to camera pixel mapping");
  ConfigFlags proj_flags;
  std::string proj_scan, proj_calib, proj_out;
  project->add_option("--scan", proj_scan)->required();
  project->add_option("--calib", proj_calib)->required();
  project->add_option("--out", proj_out)->required();
  proj_flags.Bind(project, "--view", "view", "Camera index (P<view> row)");
  proj_flags.Bind(project, "--size", "image_size", "Image H,W");

  // boxes
  CLI::App* boxes = app.add_subcommand("boxes", "Instance boxes from projected labels");
  ConfigFlags box_flags;
  std::string box_mapping, box_labels, box_out;
  boxes->add_option("--mapping", box_mapping)->required();
  boxes->add_option("--labels", box_labels)->required();
  boxes->add_option("--out", box_out)->required();
  box_flags.Bind(boxes, "--min-support", "min_support", "Minimum projected points");
  box_flags.Bind(boxes, "--things", "things", "Thing class ids");

  // heatmap
  CLI::App* heatmap = app.add_subcommand("heatmap", "Instance heatmap from boxes or masks");
  ConfigFlags hm_flags;
  std::string hm_boxes, hm_masks, hm_scores, hm_out, hm_png;
  std::optional<int> hm_view;
  auto* boxes_opt = heatmap->add_option("--boxes", hm_boxes, "Boxes TSV");
  auto* masks_opt = heatmap->add_option("--masks", hm_masks, "K x H x W LLT1 masks");
  boxes_opt->excludes(masks_opt);
  heatmap->add_option("--scores", hm_scores, "Mask scores s1,...,sK");
  heatmap->add_option("--view", hm_view, "Only boxes of this view");
  heatmap->add_option("--out", hm_out)->required();
  heatmap->add_option("--png", hm_png, "Also write an 8-bit grayscale PNG");
  hm_flags.Bind(heatmap, "--size", "image_size", "Image H,W");
  hm_flags.Bind(heatmap, "--r-corner", "r_corner", "Corner radius in pixels");
  hm_flags.Bind(heatmap, "--p-center", "p_center", "Centre radius fraction");

  // decode
  CLI::App* decode = app.add_subcommand("decode", "Group cells into instances");
  ConfigFlags dec_flags;
  std::string dec_sem, dec_centers, dec_offsets, dec_mask, dec_out;
  bool no_majority = false;
  decode->add_option("--sem", dec_sem, "H x W class map")->required();
  decode->add_option("--centers-hm", dec_centers, "H x W centre heatmap")->required();
  decode->add_option("--offsets", dec_offsets, "H x W x 2 offsets")->required();
  decode->add_option("--fore-mask", dec_mask, "H x W foreground mask")->required();
  decode->add_option("--out", dec_out, "2 x H x W panoptic map")->required();
  decode->add_flag("--no-majority", no_majority, "Keep per-cell classes");
  dec_flags.Bind(decode, "--threshold", "center_threshold", "Centre score threshold");
  dec_flags.Bind(decode, "--nms-kernel", "nms_kernel", "Odd NMS window");
  dec_flags.Bind(decode, "--top-k", "top_k", "Maximum number of centres");
  dec_flags.Bind(decode, "--things", "things", "Thing class ids");

  // eval
  CLI::App* eval = app.add_subcommand("eval", "PQ, mIoU and boundary accuracy");
  std::string ev_pred, ev_gt, ev_things, ev_stuff, ev_ignore = "0", ev_report = "json",
      ev_out, ev_points, ev_bins;
  std::optional<std::uint32_t> ev_classes;
  eval->add_option("--pred", ev_pred, ".label or 2 x H x W LLT1")->required();
  eval->add_option("--gt", ev_gt, ".label or 2 x H x W LLT1")->required();
  eval->add_option("--things", ev_things, "Thing class ids")->required();
  eval->add_option("--stuff", ev_stuff, "Stuff class ids");
  eval->add_option("--ignore", ev_ignore, "Ignored class ids");
  eval->add_option("--num-classes", ev_classes, "Class count for mIoU");
  eval->add_option("--points", ev_points, "Scan for boundary accuracy");
  eval->add_option("--bins", ev_bins, "Boundary bin edges");
  eval->add_option("--report", ev_report, "json or text")->check(CLI::IsMember({"json", "text"}));
  eval->add_option("--out", ev_out, "Report file (stdout if omitted)");

  // loss
  CLI::App* loss = app.add_subcommand("loss", "Composite segmentation loss");
  ConfigFlags loss_flags;
  std::string loss_inputs;
  std::optional<std::uint32_t> loss_ignore = 0;
  bool loss_no_ignore = false;
  loss->add_option("--inputs", loss_inputs,
                   "LLT1 bundle: logits, sem_gt, hm_pred, hm_gt, os_pred, os_gt, fm_pred, fm_gt")
      ->required();
  loss->add_option("--ignore-class", loss_ignore, "Class left out of the cross entropy");
  loss->add_flag("--no-ignore", loss_no_ignore, "Use every cell in the cross entropy");
  loss_flags.Bind(loss, "--weights", "loss_weights", "mu_hm,mu_os,mu_fm");

  // pipeline
  CLI::App* pipeline = app.add_subcommand("pipeline", "split -> mix -> voxelize -> project -> boxes -> heatmap");
  ConfigFlags pipe_flags;
  std::string pipe_data, pipe_out;
  bool pipe_resume = false;
  pipeline->add_option("--data-dir", pipe_data, "Sequence dir with velodyne/, labels/, calib.txt")
      ->required();
  pipeline->add_option("--out-dir", pipe_out)->required();
  pipeline->add_flag("--resume", pipe_resume, "Keep stage outputs that already exist");
  pipe_flags.Bind(pipeline, "--ratio", "split_ratio", "Labeled fraction");
  pipe_flags.Bind(pipeline, "--seed", "seed", "RNG seed");
  pipe_flags.Bind(pipeline, "--jobs", "jobs", "Concurrent frames");
  pipe_flags.Bind(pipeline, "--regions", "regions", "Mixture regions");
  pipe_flags.Bind(pipeline, "--p", "p_cylmix", "Probability of mixing");
  pipe_flags.Bind(pipeline, "--grid", "grid", "Grid bins");
  pipe_flags.Bind(pipeline, "--bounds", "bounds", "rho_min,rho_max,z_min,z_max");
  pipe_flags.Bind(pipeline, "--view", "view", "Camera index");
  pipe_flags.Bind(pipeline, "--size", "image_size", "Image H,W");
  pipe_flags.Bind(pipeline, "--things", "things", "Thing class ids");
  pipe_flags.Bind(pipeline, "--min-support", "min_support", "Minimum projected points");
  pipe_flags.Bind(pipeline, "--r-corner", "r_corner", "Corner radius");
  pipe_flags.Bind(pipeline, "--p-center", "p_center", "Centre radius fraction");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (split->parsed()) {
      const PipelineConfig config = split_flags.Resolve(config_path);
      EchoConfig("split", config, err);
      std::vector<std::string> frames;
      if (!frame_list.empty()) {
        frames = ReadFrameList(frame_list);
      } else if (frames_opt->count() > 0) {
        for (std::size_t i = 0; i < frame_count; ++i) frames.push_back(FrameName(i));
      } else {
        throw UsageError("split needs --frames or --frame-list");
      }
      const SplitManifest manifest_out = FixedIntervalSplit(frames, config.split_ratio);
      std::vector<std::size_t> labeled;
      for (std::size_t i = 0, j = 0; i < frames.size(); ++i) {
        if (j < manifest_out.labeled.size() && manifest_out.labeled[j] == frames[i]) {
          labeled.push_back(i);
          ++j;
        }
      }
      out << Join(labeled) << "\n";
      if (!split_out.empty()) WriteSplit(split_out, manifest_out);
    } else if (manifest->parsed()) {
      const PipelineConfig config = ConfigFlags{}.Resolve(config_path);
      EchoConfig("manifest", config, err);
      const TrainingManifest m =
          SelfTrainingManifest(ReadSplit(split_path), gt_dir, pseudo_dir);
      if (manifest_out.empty()) {
        out << FormatManifest(m);
      } else {
        WriteManifest(manifest_out, m);
      }
    } else if (mix->parsed()) {
      const PipelineConfig config = mix_flags.Resolve(config_path);
      EchoConfig("mix", config, err);
      RequireSeed(config, "mix");
      PointCloud a = ReadScan(scan_a);
      a.labels = ReadLabels(labels_a, a.size());
      PointCloud b = ReadScan(scan_b);
      b.labels = ReadLabels(labels_b, b.size());
      const std::vector<std::string> names = {
          frame_a.empty() ? fs::path(scan_a).stem().string() : frame_a,
          frame_b.empty() ? fs::path(scan_b).stem().string() : frame_b};
      MixResult result = CylinderMix(a, b, config.grid, config.mix, 0, 1);
      if (!result.mixed) {
        result.first = WithProvenance(std::move(result.first), 0);
        result.second = WithProvenance(std::move(result.second), 1);
      }
      fs::create_directories(mix_out);
      const fs::path dir(mix_out);
      int k = 1;
      for (const PointCloud* cloud : {&result.first, &result.second}) {
        const std::string stem = "mix_" + std::to_string(k++);
        WriteScan(dir / (stem + ".bin"), *cloud);
        WriteLabels(dir / (stem + ".label"), *cloud->labels);
        WriteFileAtomic(dir / (stem + ".prov"), ProvenanceSidecar(*cloud, names));
      }
      out << (result.mixed ? "mixed" : "unmixed") << " " << result.first.size()
          << " " << result.second.size() << "\n";
    } else if (voxelize->parsed()) {
      PipelineConfig config = vox_flags.Resolve(config_path);
      if (drop) config.grid.drop_out_of_bounds = true;
      EchoConfig("voxelize", config, err);
      const PointCloud cloud = ReadScan(vox_scan);
      WriteTensor(vox_out, VoxelTensor(VoxelizeFiltered(cloud, config.grid)));
    } else if (bevpool->parsed()) {
      const PipelineConfig config = bev_flags.Resolve(config_path);
      EchoConfig("bevpool", config, err);
      const Tensor features = ReadTensor(bev_features);
      if (features.rank() != 2) {
        throw Error(ErrorCode::kShape, "features must be an N x C tensor");
      }
      const std::vector<VoxelIndex> indices = IndicesFromTensor(ReadTensor(bev_indices));
      const FeatureGrid grid = BevMaxPool(features.data, static_cast<int>(features.dim(1)),
                                          indices, config.grid.grid, bev_fill);
      WriteTensor(bev_out, bev_layout == "3d" ? grid.ToTensor3d() : grid.ToTensor4d());
    } else if (project->parsed()) {
      const PipelineConfig config = proj_flags.Resolve(config_path);
      EchoConfig("project", config, err);
      const CameraModel camera = ReadCalibration(proj_calib, config.view, config.image_size);
      const PixelMapping mapping = ProjectPoints(ReadScan(proj_scan), camera);
      WriteTensor(proj_out, MappingToTensor(mapping));
    } else if (boxes->parsed()) {
      const PipelineConfig config = box_flags.Resolve(config_path);
      EchoConfig("boxes", config, err);
      const PixelMapping mapping = MappingFromTensor(ReadTensor(box_mapping));
      const std::vector<PointLabel> labels = ReadLabelFile(box_labels);
      WriteBoxesTsv(box_out, InstanceBoxes(mapping, labels, config.things, config.min_support));
    } else if (heatmap->parsed()) {
      const PipelineConfig config = hm_flags.Resolve(config_path);
      EchoConfig("heatmap", config, err);
      std::optional<Heatmap> map;
      if (!hm_masks.empty()) {
        const std::vector<double> scores = ParseDoubleList(hm_scores);
        map = MaskHeatmap(ReadTensor(hm_masks), scores);
      } else if (!hm_boxes.empty()) {
        std::vector<InstanceBox> all = ReadBoxesTsv(hm_boxes);
        std::vector<InstanceBox> selected;
        for (const InstanceBox& b : all) {
          if (!hm_view || b.view_id == *hm_view) selected.push_back(b);
        }
        map = ImageHeatmap(selected, config.heatmap, config.image_size);
      } else {
        throw UsageError("heatmap needs --boxes or --masks");
      }
      WriteTensor(hm_out, map->ToTensor());
      if (!hm_png.empty()) WriteHeatmapPng(hm_png, *map);
    } else if (decode->parsed()) {
      const PipelineConfig config = dec_flags.Resolve(config_path);
      EchoConfig("decode", config, err);
      const Heatmap centers_hm = Heatmap::FromTensor(ReadTensor(dec_centers));
      const std::vector<Center> centers = FindCenters(centers_hm, config.decode);
      PanopticMap map = AssignInstances(ReadTensor(dec_sem), ReadTensor(dec_offsets),
                                        ReadTensor(dec_mask), centers, config.things);
      if (!no_majority) map = MajoritySemantic(map);
      WriteTensor(dec_out, map.ToTensor());
      out << centers.size() << " centers\n";
    } else if (eval->parsed()) {
      const PipelineConfig config = ConfigFlags{}.Resolve(config_path);
      EchoConfig("eval", config, err);
      const PanopticMap pred = ReadPanoptic(ev_pred);
      const PanopticMap gt = ReadPanoptic(ev_gt);
      ClassSets sets;
      sets.things = ParseClassSet(ev_things);
      sets.stuff = ParseClassSet(ev_stuff);
      sets.ignore = ParseClassSet(ev_ignore);
      const PQReport pq = PanopticQuality(pred.sem, pred.inst, gt.sem, gt.inst, sets);
      std::uint32_t num_classes = 0;
      if (ev_classes) {
        num_classes = *ev_classes;
      } else {
        for (std::uint32_t c : pred.sem) num_classes = std::max(num_classes, c + 1);
        for (std::uint32_t c : gt.sem) num_classes = std::max(num_classes, c + 1);
      }
      const IoUReport iou = MeanIoU(pred.sem, gt.sem, num_classes, sets.ignore);

      json report;
      report["pq"] = pq.pq;
      report["sq"] = pq.sq;
      report["rq"] = pq.rq;
      report["pq_things"] = pq.pq_things;
      report["pq_stuff"] = pq.pq_stuff;
      report["miou"] = iou.miou;
      for (const auto& [cls, s] : pq.classes) {
        report["classes"][std::to_string(cls)] = {
            {"pq", s.pq}, {"sq", s.sq}, {"rq", s.rq}, {"tp", s.tp},
            {"fp", s.fp}, {"fn", s.fn}, {"thing", s.is_thing}};
      }
      for (const auto& [cls, v] : iou.per_class) {
        report["iou"][std::to_string(cls)] = v;
      }
      if (!ev_points.empty()) {
        const PointCloud cloud = ReadScan(ev_points);
        BoundaryBins bins;
        if (!ev_bins.empty()) bins.edges = ParseDoubleList(ev_bins);
        const BoundaryReport boundary =
            BoundaryAccuracy(cloud.points, pred.sem, gt.sem, gt.inst, bins);
        for (const auto& [cls, per_bin] : boundary.per_class) {
          json arr = json::array();
          for (const BinAccuracy& b : per_bin) {
            arr.push_back({{"correct", b.correct}, {"total", b.total},
                           {"accuracy", b.accuracy()}});
          }
          report["boundary"][std::to_string(cls)] = arr;
        }
      }

      std::string text;
      if (ev_report == "json") {
        text = report.dump(2) + "\n";
      } else {
        std::ostringstream table;
        table << "class\tPQ\tSQ\tRQ\tTP\tFP\tFN\n";
        for (const auto& [cls, s] : pq.classes) {
          table << cls << '\t' << FormatDouble(s.pq) << '\t' << FormatDouble(s.sq) << '\t'
                << FormatDouble(s.rq) << '\t' << s.tp << '\t' << s.fp << '\t' << s.fn << '\n';
        }
        table << "PQ\t" << FormatDouble(pq.pq) << "\nPQ_things\t" << FormatDouble(pq.pq_things)
              << "\nPQ_stuff\t" << FormatDouble(pq.pq_stuff) << "\nmIoU\t"
              << FormatDouble(iou.miou) << "\n";
        text = table.str();
      }
      if (ev_out.empty()) {
        out << text;
      } else {
        WriteFileAtomic(ev_out, text);
      }
    } else if (loss->parsed()) {
      const PipelineConfig config = loss_flags.Resolve(config_path);
      EchoConfig("loss", config, err);
      const std::vector<Tensor> t = ReadTensorBundle(loss_inputs);
      if (t.size() != 8) {
        throw Error(ErrorCode::kShape, "loss bundle needs 8 tensors, found " +
                                           std::to_string(t.size()));
      }
      if (t[0].rank() != 2) {
        throw Error(ErrorCode::kShape, "semantic logits must be cells x classes");
      }
      std::vector<std::uint32_t> sem_gt(t[1].data.size());
      for (std::size_t i = 0; i < sem_gt.size(); ++i) {
        sem_gt[i] = static_cast<std::uint32_t>(t[1].data[i]);
      }
      LossInputs in;
      in.sem_logits = t[0].data;
      in.num_classes = static_cast<int>(t[0].dim(1));
      in.sem_gt = sem_gt;
      in.hm_pred = t[2].data;
      in.hm_gt = t[3].data;
      in.os_pred = t[4].data;
      in.os_gt = t[5].data;
      in.fm_pred = t[6].data;
      in.fm_gt = t[7].data;
      in.ignore_class = loss_no_ignore ? std::nullopt : loss_ignore;
      const LossReport r = SegmentationLoss(in, config.loss);
      json report = {{"sem", r.sem}, {"hm", r.hm}, {"os", r.os},
                     {"fm", r.fm},   {"total", r.total}};
      out << report.dump(2) << "\n";
    } else if (pipeline->parsed()) {
      PipelineOptions options;
      options.config = pipe_flags.Resolve(config_path);
      EchoConfig("pipeline", options.config, err);
      RequireSeed(options.config, "pipeline");
      options.data_dir = pipe_data;
      options.out_dir = pipe_out;
      options.resume = pipe_resume;
      RunPipeline(options, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error[" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return Run(args, out, err);
}

}  // namespace latentlab::cli
