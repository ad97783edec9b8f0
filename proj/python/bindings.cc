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

// Python bindings for the hot-path operations. Arrays in, arrays out.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "latentlab/bev_pool.h"
#include "latentlab/camera_projection.h"
#include "latentlab/cylinder_grid.h"
#include "latentlab/cylinder_mix.h"
#include "latentlab/error.h"
#include "latentlab/ipsl_heatmap.h"
#include "latentlab/metrics.h"
#include "latentlab/point_cloud.h"

namespace py = pybind11;

namespace latentlab {
namespace {

template <typename T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

using GridTuple = std::tuple<int, int, int>;
using BoundsTuple = std::tuple<double, double, double, double>;

CylinderGridSpec MakeGrid(const GridTuple& grid, const BoundsTuple& bounds,
                          bool drop_out_of_bounds) {
  CylinderGridSpec spec;
  spec.grid = GridDims{std::get<0>(grid), std::get<1>(grid), std::get<2>(grid)};
  spec.rho_min = std::get<0>(bounds);
  spec.rho_max = std::get<1>(bounds);
  spec.z_min = std::get<2>(bounds);
  spec.z_max = std::get<3>(bounds);
  spec.drop_out_of_bounds = drop_out_of_bounds;
  spec.Validate();
  return spec;
}

void RequireShape(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShape, what);
}

// N x 3 or N x 4 float32 rows (x, y, z[, b]).
PointCloud CloudFromArray(const Array<float>& points) {
  RequireShape(points.ndim() == 2 && (points.shape(1) == 3 || points.shape(1) == 4),
               "points must be an N x 3 or N x 4 array");
  const auto n = static_cast<std::size_t>(points.shape(0));
  const auto cols = static_cast<std::size_t>(points.shape(1));
  const float* data = points.data();
  PointCloud cloud;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float* row = data + i * cols;
    cloud.points[i] = Point{row[0], row[1], row[2], cols == 4 ? row[3] : 0.0f};
  }
  return cloud;
}

// N x 2 (sem, inst) rows, or N packed SemanticKITTI values.
std::vector<PointLabel> LabelsFromArray(const Array<std::uint32_t>& labels,
                                        std::size_t n) {
  std::vector<PointLabel> out(n);
  const std::uint32_t* data = labels.data();
  if (labels.ndim() == 1) {
    RequireShape(static_cast<std::size_t>(labels.shape(0)) == n,
                 "labels must have one entry per point");
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = PointLabel{data[i] & 0xFFFFu, data[i] >> 16};
    }
  } else {
    RequireShape(labels.ndim() == 2 && labels.shape(1) == 2 &&
                     static_cast<std::size_t>(labels.shape(0)) == n,
                 "labels must be an N x 2 (sem, inst) array with one row per point");
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = PointLabel{data[2 * i], data[2 * i + 1]};
    }
  }
  return out;
}

py::dict CloudToDict(const PointCloud& cloud) {
  const auto n = static_cast<py::ssize_t>(cloud.size());
  Array<float> points({n, py::ssize_t{4}});
  Array<std::uint32_t> labels({n, py::ssize_t{2}});
  Array<std::uint32_t> provenance({n, py::ssize_t{2}});
  float* p = points.mutable_data();
  std::uint32_t* l = labels.mutable_data();
  std::uint32_t* s = provenance.mutable_data();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& pt = cloud.points[i];
    p[4 * i] = pt.x;
    p[4 * i + 1] = pt.y;
    p[4 * i + 2] = pt.z;
    p[4 * i + 3] = pt.b;
    l[2 * i] = (*cloud.labels)[i].sem;
    l[2 * i + 1] = (*cloud.labels)[i].inst;
    s[2 * i] = (*cloud.provenance)[i].source_frame;
    s[2 * i + 1] = (*cloud.provenance)[i].original_index;
  }
  py::dict out;
  out["points"] = points;
  out["labels"] = labels;
  out["provenance"] = provenance;
  return out;
}

PointCloud Tagged(PointCloud cloud, std::uint32_t source) {
  if (!cloud.provenance) {
    cloud.provenance.emplace(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      (*cloud.provenance)[i] = Provenance{source, static_cast<std::uint32_t>(i)};
    }
  }
  return cloud;
}

Array<std::int32_t> PyVoxelize(const Array<float>& points, const GridTuple& grid,
                               const BoundsTuple& bounds, bool drop_out_of_bounds) {
  const CylinderGridSpec spec = MakeGrid(grid, bounds, drop_out_of_bounds);
  const PointCloud cloud = CloudFromArray(points);
  std::vector<std::optional<VoxelIndex>> indices;
  {
    py::gil_scoped_release release;
    indices = VoxelizeFiltered(cloud, spec);
  }
  Array<std::int32_t> out({static_cast<py::ssize_t>(indices.size()), py::ssize_t{3}});
  std::int32_t* data = out.mutable_data();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& v = indices[i];
    data[3 * i] = v ? v->x : -1;
    data[3 * i + 1] = v ? v->y : -1;
    data[3 * i + 2] = v ? v->z : -1;
  }
  return out;
}

py::dict PyCylinderMix(const Array<float>& points_a, const Array<std::uint32_t>& labels_a,
                       const Array<float>& points_b, const Array<std::uint32_t>& labels_b,
                       std::uint64_t seed, double p_cylmix, const GridTuple& regions,
                       const GridTuple& grid, const BoundsTuple& bounds) {
  const CylinderGridSpec spec = MakeGrid(grid, bounds, false);
  MixSpec mix;
  mix.regions = RegionSize{std::get<0>(regions), std::get<1>(regions), std::get<2>(regions)};
  mix.p_cylmix = p_cylmix;
  mix.seed = seed;
  PointCloud a = CloudFromArray(points_a);
  a.labels = LabelsFromArray(labels_a, a.size());
  PointCloud b = CloudFromArray(points_b);
  b.labels = LabelsFromArray(labels_b, b.size());
  MixResult result;
  {
    py::gil_scoped_release release;
    result = CylinderMix(a, b, spec, mix, 0, 1);
  }
  result.first = Tagged(std::move(result.first), 0);
  result.second = Tagged(std::move(result.second), 1);
  py::dict out;
  out["mixed"] = result.mixed;
  out["first"] = CloudToDict(result.first);
  out["second"] = CloudToDict(result.second);
  return out;
}

Array<float> PyBevMaxPool(const Array<float>& features, const Array<std::int32_t>& indices,
                          const GridTuple& grid, float fill, const std::string& layout) {
  RequireShape(features.ndim() == 2, "features must be an N x C array");
  RequireShape(indices.ndim() == 2 && indices.shape(1) == 3 &&
                   indices.shape(0) == features.shape(0),
               "indices must be an N x 3 array matching features");
  if (layout != "4d" && layout != "3d") {
    throw Error(ErrorCode::kInvalidArgument, "layout must be '4d' or '3d'");
  }
  const auto n = static_cast<std::size_t>(indices.shape(0));
  std::vector<VoxelIndex> idx(n);
  const std::int32_t* raw = indices.data();
  for (std::size_t i = 0; i < n; ++i) idx[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
  const GridDims dims{std::get<0>(grid), std::get<1>(grid), std::get<2>(grid)};
  const auto channels = static_cast<int>(features.shape(1));
  const std::span<const float> values(features.data(), n * static_cast<std::size_t>(channels));
  Tensor tensor;
  {
    py::gil_scoped_release release;
    const FeatureGrid pooled = BevMaxPool(values, channels, idx, dims, fill);
    tensor = layout == "3d" ? pooled.ToTensor3d() : pooled.ToTensor4d();
  }
  std::vector<py::ssize_t> shape(tensor.dims.begin(), tensor.dims.end());
  Array<float> out(shape);
  std::copy(tensor.data.begin(), tensor.data.end(), out.mutable_data());
  return out;
}

Array<double> PyImageHeatmap(const Array<std::int32_t>& boxes,
                             const std::tuple<int, int>& size, double r_corner,
                             double p_center, double r_center_floor) {
  RequireShape(boxes.size() == 0 || (boxes.ndim() == 2 && boxes.shape(1) == 4),
               "boxes must be an M x 4 array of (h_min, w_min, h_max, w_max)");
  HeatmapSpec spec{r_corner, p_center, r_center_floor};
  std::vector<InstanceBox> list(boxes.size() == 0 ? 0 : boxes.shape(0));
  const std::int32_t* raw = boxes.data();
  for (std::size_t i = 0; i < list.size(); ++i) {
    list[i].h_min = raw[4 * i];
    list[i].w_min = raw[4 * i + 1];
    list[i].h_max = raw[4 * i + 2];
    list[i].w_max = raw[4 * i + 3];
  }
  const ImageSize image{std::get<0>(size), std::get<1>(size)};
  std::vector<double> values;
  {
    py::gil_scoped_release release;
    const Heatmap map = ImageHeatmap(list, spec, image);
    values.assign(map.values().begin(), map.values().end());
  }
  Array<double> out({static_cast<py::ssize_t>(image.height),
                     static_cast<py::ssize_t>(image.width)});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::span<const std::uint32_t> Span(const Array<std::uint32_t>& a) {
  RequireShape(a.ndim() == 1, "label arrays must be one-dimensional");
  return {a.data(), static_cast<std::size_t>(a.shape(0))};
}

py::dict PyPanopticQuality(const Array<std::uint32_t>& pred_sem,
                           const Array<std::uint32_t>& pred_inst,
                           const Array<std::uint32_t>& gt_sem,
                           const Array<std::uint32_t>& gt_inst,
                           const std::set<std::uint32_t>& things,
                           const std::set<std::uint32_t>& stuff,
                           const std::set<std::uint32_t>& ignore) {
  const PQReport r = PanopticQuality(Span(pred_sem), Span(pred_inst), Span(gt_sem),
                                     Span(gt_inst), ClassSets{things, stuff, ignore});
  py::dict classes;
  for (const auto& [cls, s] : r.classes) {
    py::dict c;
    c["pq"] = s.pq;
    c["sq"] = s.sq;
    c["rq"] = s.rq;
    c["tp"] = s.tp;
    c["fp"] = s.fp;
    c["fn"] = s.fn;
    c["thing"] = s.is_thing;
    classes[py::int_(cls)] = c;
  }
  py::dict out;
  out["pq"] = r.pq;
  out["sq"] = r.sq;
  out["rq"] = r.rq;
  out["pq_things"] = r.pq_things;
  out["pq_stuff"] = r.pq_stuff;
  out["classes"] = classes;
  return out;
}

py::dict PyMeanIoU(const Array<std::uint32_t>& pred, const Array<std::uint32_t>& gt,
                   std::uint32_t num_classes, const std::set<std::uint32_t>& ignore) {
  const IoUReport r = MeanIoU(Span(pred), Span(gt), num_classes, ignore);
  py::dict out;
  out["miou"] = r.miou;
  out["per_class"] = r.per_class;
  return out;
}

}  // namespace
}  // namespace latentlab

PYBIND11_MODULE(_latentlab, m) {
  using namespace latentlab;
  namespace py = pybind11;
  using py::literals::operator""_a;
  m.doc() = "Point-cloud latent label data engine";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&]() -> py::object {
    return py::exception<Error>(m, "LatentLabError", PyExc_RuntimeError);
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object instance = type(e.what());
      instance.attr("code") = std::string(ErrorCodeName(e.code()));
      PyErr_SetObject(type.ptr(), instance.ptr());
    }
  });

  const GridTuple grid{480, 360, 32};
  const BoundsTuple bounds{3.0, 50.0, -3.0, 1.5};

  m.def("voxelize", &PyVoxelize, "points"_a, "grid"_a = grid, "bounds"_a = bounds,
        "drop_out_of_bounds"_a = false,
        "Cylindrical voxel index (N x 3 int32) per point; dropped points are -1.");
  m.def("cylinder_mix", &PyCylinderMix, "points_a"_a, "labels_a"_a, "points_b"_a,
        "labels_b"_a, py::kw_only(), "seed"_a, "p_cylmix"_a = 0.25,
        "regions"_a = GridTuple{4, 4, 2}, "grid"_a = grid, "bounds"_a = bounds,
        "Interleaved mixing of two labeled clouds. Provenance rows are "
        "(source, row) with source 0 for a and 1 for b.");
  m.def("bev_max_pool", &PyBevMaxPool, "features"_a, "indices"_a, "grid"_a, "fill"_a = 0.0f,
        "layout"_a = "4d", "Per-voxel elementwise max of point features.");
  m.def("image_heatmap", &PyImageHeatmap, "boxes"_a, "size"_a, "r_corner"_a = 5.0,
        "p_center"_a = 0.25, "r_center_floor"_a = 1.0,
        "Instance heatmap (H x W float64) from (h_min, w_min, h_max, w_max) boxes.");
  m.def("panoptic_quality", &PyPanopticQuality, "pred_sem"_a, "pred_inst"_a, "gt_sem"_a,
        "gt_inst"_a, py::kw_only(), "things"_a, "stuff"_a = std::set<std::uint32_t>{},
        "ignore"_a = std::set<std::uint32_t>{0}, "Panoptic quality report.");
  m.def("mean_iou", &PyMeanIoU, "pred"_a, "gt"_a, "num_classes"_a,
        "ignore"_a = std::set<std::uint32_t>{0}, "Mean IoU report.");
}
