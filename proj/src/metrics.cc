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

#include "latentlab/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "latentlab/error.h"

namespace latentlab {
namespace {

// Segment areas and pairwise overlaps of one class.
struct ClassSegments {
  std::map<std::uint32_t, std::uint64_t> pred_area;
  std::map<std::uint32_t, std::uint64_t> gt_area;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> overlap;
};

double Mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

PQReport PanopticQuality(std::span<const std::uint32_t> pred_sem,
                         std::span<const std::uint32_t> pred_inst,
                         std::span<const std::uint32_t> gt_sem,
                         std::span<const std::uint32_t> gt_inst,
                         const ClassSets& classes) {
  const std::size_t n = gt_sem.size();
  if (pred_sem.size() != n || pred_inst.size() != n || gt_inst.size() != n) {
    throw Error(ErrorCode::kShape,
                "prediction and ground truth are not aligned");
  }
  for (std::uint32_t c : classes.things) {
    if (classes.stuff.contains(c) || classes.ignore.contains(c)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "class " + std::to_string(c) + " is in more than one set");
    }
  }
  for (std::uint32_t c : classes.stuff) {
    if (classes.ignore.contains(c)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "class " + std::to_string(c) + " is in more than one set");
    }
  }

  // Segment id within its class: the instance id for things (0 = none),
  // constant 1 for stuff.
  auto segment_of = [&](std::uint32_t cls, std::uint32_t inst) -> std::uint32_t {
    if (classes.things.contains(cls)) return inst;
    if (classes.stuff.contains(cls)) return 1;
    return 0;
  };

  std::map<std::uint32_t, ClassSegments> per_class;
  for (std::size_t i = 0; i < n; ++i) {
    if (classes.ignore.contains(gt_sem[i])) continue;
    const std::uint32_t gt_seg = segment_of(gt_sem[i], gt_inst[i]);
    const std::uint32_t pred_seg = segment_of(pred_sem[i], pred_inst[i]);
    if (gt_seg != 0) ++per_class[gt_sem[i]].gt_area[gt_seg];
    if (pred_seg != 0) ++per_class[pred_sem[i]].pred_area[pred_seg];
    if (gt_seg != 0 && pred_seg != 0 && gt_sem[i] == pred_sem[i]) {
      ++per_class[gt_sem[i]].overlap[{gt_seg, pred_seg}];
    }
  }

  PQReport report;
  std::vector<double> all_pq, all_sq, all_rq, thing_pq, stuff_pq;
  for (const auto& [cls, seg] : per_class) {
    ClassPQ stats;
    stats.is_thing = classes.things.contains(cls);
    std::map<std::uint32_t, bool> pred_matched;
    std::uint64_t gt_matched = 0;
    // Overlaps are visited in ascending (gt, pred) order, which fixes the
    // summation order of the IoUs.
    for (const auto& [ids, inter] : seg.overlap) {
      const std::uint64_t uni =
          seg.gt_area.at(ids.first) + seg.pred_area.at(ids.second) - inter;
      const double iou = static_cast<double>(inter) / static_cast<double>(uni);
      if (iou > 0.5) {
        ++stats.tp;
        stats.iou_sum += iou;
        pred_matched[ids.second] = true;
        ++gt_matched;
      }
    }
    stats.fn = seg.gt_area.size() - gt_matched;
    stats.fp = seg.pred_area.size() - pred_matched.size();
    if (!stats.present()) continue;
    const double denom = static_cast<double>(stats.tp) +
                         0.5 * static_cast<double>(stats.fp) +
                         0.5 * static_cast<double>(stats.fn);
    stats.sq = stats.tp == 0 ? 0.0 : stats.iou_sum / static_cast<double>(stats.tp);
    stats.rq = static_cast<double>(stats.tp) / denom;
    stats.pq = stats.sq * stats.rq;
    report.classes[cls] = stats;
    all_pq.push_back(stats.pq);
    all_sq.push_back(stats.sq);
    all_rq.push_back(stats.rq);
    (stats.is_thing ? thing_pq : stuff_pq).push_back(stats.pq);
  }
  report.pq = Mean(all_pq);
  report.sq = Mean(all_sq);
  report.rq = Mean(all_rq);
  report.pq_things = Mean(thing_pq);
  report.pq_stuff = Mean(stuff_pq);
  return report;
}

IoUReport MeanIoU(std::span<const std::uint32_t> pred_sem,
                  std::span<const std::uint32_t> gt_sem,
                  std::uint32_t num_classes,
                  const std::set<std::uint32_t>& ignore) {
  if (pred_sem.size() != gt_sem.size()) {
    throw Error(ErrorCode::kShape,
                "prediction and ground truth are not aligned");
  }
  std::vector<std::uint64_t> tp(num_classes, 0), fp(num_classes, 0),
      fn(num_classes, 0);
  std::vector<bool> seen(num_classes, false);
  for (std::size_t i = 0; i < gt_sem.size(); ++i) {
    const std::uint32_t g = gt_sem[i];
    const std::uint32_t p = pred_sem[i];
    if (g >= num_classes || p >= num_classes) {
      throw Error(ErrorCode::kInvalidClass,
                  "class id " + std::to_string(std::max(g, p)) +
                      " >= num_classes " + std::to_string(num_classes));
    }
    if (ignore.contains(g)) continue;
    seen[g] = true;
    seen[p] = true;
    if (g == p) {
      ++tp[g];
    } else {
      ++fn[g];
      ++fp[p];
    }
  }
  IoUReport report;
  std::vector<double> ious;
  for (std::uint32_t c = 0; c < num_classes; ++c) {
    if (!seen[c] || ignore.contains(c)) continue;
    const double iou = static_cast<double>(tp[c]) /
                       static_cast<double>(tp[c] + fp[c] + fn[c]);
    report.per_class[c] = iou;
    ious.push_back(iou);
  }
  report.miou = Mean(ious);
  return report;
}

std::size_t BoundaryBins::BinOf(double ratio) const {
  return static_cast<std::size_t>(
      std::upper_bound(edges.begin(), edges.end(), ratio) - edges.begin());
}

void BoundaryBins::Validate() const {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "boundary bin edges must be strictly ascending");
    }
  }
}

BoundaryReport BoundaryAccuracy(std::span<const Point> points,
                                std::span<const std::uint32_t> pred_sem,
                                std::span<const std::uint32_t> gt_sem,
                                std::span<const std::uint32_t> gt_inst,
                                const BoundaryBins& bins) {
  bins.Validate();
  const std::size_t n = points.size();
  if (pred_sem.size() != n || gt_sem.size() != n || gt_inst.size() != n) {
    throw Error(ErrorCode::kShape, "points and labels are not aligned");
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>>
      instances;
  for (std::size_t i = 0; i < n; ++i) {
    if (gt_inst[i] != 0) instances[{gt_sem[i], gt_inst[i]}].push_back(i);
  }
  BoundaryReport report;
  for (const auto& [key, members] : instances) {
    double cx = 0.0, cy = 0.0, cz = 0.0;
    for (std::size_t i : members) {
      cx += points[i].x;
      cy += points[i].y;
      cz += points[i].z;
    }
    const double count = static_cast<double>(members.size());
    cx /= count;
    cy /= count;
    cz /= count;
    std::vector<double> dist(members.size());
    double size = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Point& p = points[members[k]];
      dist[k] = std::sqrt((p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy) +
                          (p.z - cz) * (p.z - cz));
      size = std::max(size, dist[k]);
    }
    auto& per_bin = report.per_class[key.first];
    per_bin.resize(bins.num_bins());
    for (std::size_t k = 0; k < members.size(); ++k) {
      const double ratio = size > 0.0 ? dist[k] / size : 0.0;
      BinAccuracy& bin = per_bin[size > 0.0 ? bins.BinOf(ratio) : 0];
      ++bin.total;
      if (pred_sem[members[k]] == gt_sem[members[k]]) ++bin.correct;
    }
  }
  return report;
}

void LossWeights::Validate() const {
  if (!(mu_hm >= 0.0 && mu_os >= 0.0 && mu_fm >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "loss weights must be >= 0");
  }
}

double CombineLoss(double sem, double hm, double os, double fm,
                   const LossWeights& weights) {
  return sem + weights.mu_hm * hm + weights.mu_os * os + weights.mu_fm * fm;
}

namespace {

double MeanSquaredError(std::span<const float> pred,
                        std::span<const float> gt, const char* name) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kShape, std::string(name) +
                                       " prediction and target differ in size");
  }
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - gt[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double MeanAbsoluteError(std::span<const float> pred,
                         std::span<const float> gt, const char* name) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kShape, std::string(name) +
                                       " prediction and target differ in size");
  }
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += std::abs(static_cast<double>(pred[i]) - gt[i]);
  }
  return sum / static_cast<double>(pred.size());
}

double CrossEntropy(const LossInputs& in) {
  const std::size_t cells = in.sem_gt.size();
  if (in.num_classes < 1 ||
      in.sem_logits.size() != cells * static_cast<std::size_t>(in.num_classes)) {
    throw Error(ErrorCode::kShape, "semantic logits must be cells x classes");
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    const std::uint32_t target = in.sem_gt[i];
    if (in.ignore_class && target == *in.ignore_class) continue;
    if (target >= static_cast<std::uint32_t>(in.num_classes)) {
      throw Error(ErrorCode::kInvalidClass,
                  "target class " + std::to_string(target) + " out of range");
    }
    const float* row = in.sem_logits.data() + i * in.num_classes;
    double peak = row[0];
    for (int c = 1; c < in.num_classes; ++c) peak = std::max<double>(peak, row[c]);
    double total = 0.0;
    for (int c = 0; c < in.num_classes; ++c) total += std::exp(row[c] - peak);
    sum += peak + std::log(total) - row[target];
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

}  // namespace

LossReport SegmentationLoss(const LossInputs& inputs,
                            const LossWeights& weights) {
  weights.Validate();
  if (inputs.os_pred.size() % 2 != 0) {
    throw Error(ErrorCode::kShape, "offsets must have two channels");
  }
  LossReport report;
  report.sem = CrossEntropy(inputs);
  report.hm = MeanSquaredError(inputs.hm_pred, inputs.hm_gt, "heatmap");
  report.os = MeanAbsoluteError(inputs.os_pred, inputs.os_gt, "offset");
  report.fm = MeanSquaredError(inputs.fm_pred, inputs.fm_gt, "foreground mask");
  report.total = CombineLoss(report.sem, report.hm, report.os, report.fm, weights);
  return report;
}

}  // namespace latentlab
