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

#ifndef LATENTLAB_METRICS_H_
#define LATENTLAB_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "latentlab/point_cloud.h"

namespace latentlab {

struct ClassPQ {
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
  double iou_sum = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  bool is_thing = false;

  // A class with no segment in either input has no defined PQ.
  bool present() const { return tp + fp + fn > 0; }
};

struct PQReport {
  std::map<std::uint32_t, ClassPQ> classes;
  double pq = 0.0;
  double pq_things = 0.0;
  double pq_stuff = 0.0;
  double sq = 0.0;
  double rq = 0.0;
};

struct ClassSets {
  std::set<std::uint32_t> things;
  std::set<std::uint32_t> stuff;
  std::set<std::uint32_t> ignore{0};
};

// Panoptic quality over aligned (sem, inst) labels. Elements whose ground
// truth class is ignored are dropped. Thing segments are the (class, inst)
// groups with inst > 0; each stuff class is a single segment. A predicted
// and a ground-truth segment of the same class match when IoU > 0.5.
PQReport PanopticQuality(std::span<const std::uint32_t> pred_sem,
                         std::span<const std::uint32_t> pred_inst,
                         std::span<const std::uint32_t> gt_sem,
                         std::span<const std::uint32_t> gt_inst,
                         const ClassSets& classes);

struct IoUReport {
  // Classes that occur in prediction or ground truth, minus ignored ones.
  std::map<std::uint32_t, double> per_class;
  double miou = 0.0;
};

// Elements with an ignored ground-truth class are skipped.
IoUReport MeanIoU(std::span<const std::uint32_t> pred_sem,
                  std::span<const std::uint32_t> gt_sem,
                  std::uint32_t num_classes,
                  const std::set<std::uint32_t>& ignore = {0});

struct BoundaryBins {
  // Bin i holds ratios in [edges[i-1], edges[i]); the last bin is open.
  std::vector<double> edges{1.0 / 3.0, 2.0 / 3.0};

  std::size_t num_bins() const { return edges.size() + 1; }
  std::size_t BinOf(double ratio) const;
  void Validate() const;
};

struct BinAccuracy {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
  }
};

struct BoundaryReport {
  // class id -> one entry per bin.
  std::map<std::uint32_t, std::vector<BinAccuracy>> per_class;
};

// Semantic accuracy of instance points binned by r = d / size, where d is
// the distance to the instance centroid and size is the largest such
// distance in the instance. Instances are ground-truth (class, inst) groups
// with inst > 0.
BoundaryReport BoundaryAccuracy(std::span<const Point> points,
                                std::span<const std::uint32_t> pred_sem,
                                std::span<const std::uint32_t> gt_sem,
                                std::span<const std::uint32_t> gt_inst,
                                const BoundaryBins& bins);

struct LossWeights {
  double mu_hm = 100.0;
  double mu_os = 10.0;
  double mu_fm = 1.0;

  void Validate() const;
};

struct LossInputs {
  std::span<const float> sem_logits;  // cells x num_classes
  int num_classes = 0;
  std::span<const std::uint32_t> sem_gt;
  std::span<const float> hm_pred;
  std::span<const float> hm_gt;
  std::span<const float> os_pred;  // cells x 2
  std::span<const float> os_gt;
  std::span<const float> fm_pred;
  std::span<const float> fm_gt;
  // Cells with this ground-truth class are left out of the cross entropy.
  std::optional<std::uint32_t> ignore_class = 0;
};

struct LossReport {
  double sem = 0.0;
  double hm = 0.0;
  double os = 0.0;
  double fm = 0.0;
  double total = 0.0;
};

// sem: mean cross entropy; hm, fm: mean squared error; os: mean absolute
// error over both offset channels. total = sem + mu_hm hm + mu_os os +
// mu_fm fm.
LossReport SegmentationLoss(const LossInputs& inputs,
                            const LossWeights& weights = {});

double CombineLoss(double sem, double hm, double os, double fm,
                   const LossWeights& weights);

}  // namespace latentlab

#endif  // LATENTLAB_METRICS_H_
