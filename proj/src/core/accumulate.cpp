#include "core/accumulate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/threading.hpp"

namespace scn {

namespace {

double point_segment_dist(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double n2 = ab.norm2();
  double t = n2 > 0.0 ? std::clamp((p - a).dot(ab) / n2, 0.0, 1.0) : 0.0;
  return (a + ab * t - p).norm();
}

VoxelIdx clamped_index(const VoxelMap& vm, const Vec3& p) {
  VoxelIdx v = vm.index_of(p);
  v.x = std::clamp(v.x, 0, vm.dims.x - 1);
  v.y = std::clamp(v.y, 0, vm.dims.y - 1);
  v.z = std::clamp(v.z, 0, vm.dims.z - 1);
  return v;
}

}  // namespace

std::vector<VoxelIdx> traverse_ray(const VoxelMap& vm, const Vec3& a,
                                   const Vec3& b, bool include_end) {
  Vec3 d = b - a;
  if (d.norm2() == 0.0) return {};

  Vec3 lo = vm.origin;
  Vec3 hi = vm.origin + Vec3{vm.dims.x * vm.edge, vm.dims.y * vm.edge,
                             vm.dims.z * vm.edge};
  double t0 = 0.0, t1 = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    double o = a[ax], dd = d[ax];
    double l = lo[ax], h = hi[ax];
    if (std::abs(dd) < 1e-300) {
      if (o < l || o > h) return {};
    } else {
      double ta = (l - o) / dd;
      double tb = (h - o) / dd;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
  }
  if (t0 > t1) return {};

  Vec3 start = a + d * t0;
  VoxelIdx v = clamped_index(vm, start);
  VoxelIdx vb = vm.index_of(b);
  bool b_inside = vm.in_bounds(vb) && t1 >= 1.0 - 1e-15;

  int step[3];
  double t_max[3], t_delta[3];
  const double da[3] = {d.x, d.y, d.z};
  const int vi[3] = {v.x, v.y, v.z};
  for (int ax = 0; ax < 3; ++ax) {
    if (da[ax] > 0.0) {
      step[ax] = 1;
      double boundary = vm.origin[ax] + (vi[ax] + 1) * vm.edge;
      t_max[ax] = (boundary - a[ax]) / da[ax];
      t_delta[ax] = vm.edge / da[ax];
    } else if (da[ax] < 0.0) {
      step[ax] = -1;
      double boundary = vm.origin[ax] + vi[ax] * vm.edge;
      t_max[ax] = (boundary - a[ax]) / da[ax];
      t_delta[ax] = -vm.edge / da[ax];
    } else {
      step[ax] = 0;
      t_max[ax] = std::numeric_limits<double>::infinity();
      t_delta[ax] = std::numeric_limits<double>::infinity();
    }
  }

  std::vector<VoxelIdx> out;
  while (vm.in_bounds(v)) {
    if (b_inside && v == vb) {
      if (include_end) out.push_back(v);
      break;
    }
    out.push_back(v);
    int ax = 0;
    if (t_max[1] < t_max[ax]) ax = 1;
    if (t_max[2] < t_max[ax]) ax = 2;
    if (t_max[ax] >= t1 - 1e-15) break;
    if (ax == 0)
      v.x += step[0];
    else if (ax == 1)
      v.y += step[1];
    else
      v.z += step[2];
    t_max[ax] += t_delta[ax];
  }
  return out;
}

AccumulateResult accumulate(std::span<const ScanInput> scans,
                            const SceneExtent& extent, double voxel_edge,
                            uint64_t seed, int cap_per_voxel) {
  if (scans.empty()) fail(ErrorCode::argument, "accumulate needs scans");
  if (!(voxel_edge > 0.0))
    fail(ErrorCode::argument, "voxel edge must be > 0");
  if (!extent.valid()) fail(ErrorCode::argument, "invalid extent");
  if (cap_per_voxel < 1) fail(ErrorCode::argument, "cap must be >= 1");
  for (const ScanInput& s : scans) {
    if (!s.pose.valid()) fail(ErrorCode::argument, "pose not a rigid motion");
    if (!s.labels.empty() && s.labels.size() != s.cloud.points.size())
      fail(ErrorCode::argument, "label count does not match point count");
    if (!s.dynamic.empty() && s.dynamic.size() != s.cloud.points.size())
      fail(ErrorCode::argument, "dynamic flag count does not match points");
  }

  VoxelMap vm = VoxelMap::from_extent(extent, voxel_edge);
  struct Cand {
    Vec3 pos;
    uint16_t cls;
    Vec3 origin;
  };
  std::vector<Cand> cands;
  std::vector<Vec3> dyn_points;
  std::vector<char> traversed(vm.voxel_count(), 0);
  AccumulateResult res;

  for (size_t s = 0; s < scans.size(); ++s) {
    const ScanInput& scan = scans[s];
    Vec3 origin_w = scan.pose.apply(scan.cloud.sensor_origin);
    for (size_t i = 0; i < scan.cloud.points.size(); ++i) {
      Vec3 pw = scan.pose.apply(scan.cloud.points[i].position);
      bool dyn = !scan.dynamic.empty() && scan.dynamic[i] != 0;
      if (dyn && s > 0) {
        ++res.points_dropped_dynamic;
        continue;
      }
      if (dyn) dyn_points.push_back(pw);
      for (const VoxelIdx& v : traverse_ray(vm, origin_w, pw))
        traversed[vm.flat(v)] = 1;
      if (extent.contains(pw)) {
        uint16_t cls = scan.labels.empty() ? kUnlabeled : scan.labels[i];
        cands.push_back({pw, cls, origin_w});
      }
    }
  }

  std::unordered_map<VoxelIdx, std::vector<uint32_t>, VoxelIdxHash> buckets;
  for (size_t i = 0; i < cands.size(); ++i)
    buckets[clamped_index(vm, cands[i].pos)].push_back(
        static_cast<uint32_t>(i));

  std::vector<VoxelIdx> keys;
  keys.reserve(buckets.size());
  for (const auto& [k, _] : buckets) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  Rng cap_rng = Rng::stream(seed, "accumulate.cap");
  std::vector<uint32_t> kept;
  for (const VoxelIdx& k : keys) {
    auto& list = buckets[k];
    if (list.size() <= static_cast<size_t>(cap_per_voxel)) {
      kept.insert(kept.end(), list.begin(), list.end());
    } else {
      for (int j = 0; j < cap_per_voxel; ++j) {
        size_t pick = j + cap_rng.below(list.size() - j);
        std::swap(list[j], list[pick]);
      }
      kept.insert(kept.end(), list.begin(), list.begin() + cap_per_voxel);
      res.points_dropped_cap += list.size() - cap_per_voxel;
    }
  }
  std::sort(kept.begin(), kept.end());  // restore scan order

  std::vector<char> occupied(vm.voxel_count(), 0);
  for (const VoxelIdx& k : keys) occupied[vm.flat(k)] = 1;

  std::vector<char> unseen(vm.voxel_count(), 0);
  if (!dyn_points.empty()) {
    Vec3 origin0 = scans[0].pose.apply(scans[0].cloud.sensor_origin);
    double diag = voxel_edge * std::sqrt(3.0);
    std::vector<double> dyn_dist(dyn_points.size());
    for (size_t i = 0; i < dyn_points.size(); ++i)
      dyn_dist[i] = (dyn_points[i] - origin0).norm();
    parallel_for(vm.voxel_count(), [&](size_t flat) {
      if (occupied[flat]) return;
      int32_t x = static_cast<int32_t>(flat / (vm.dims.y * vm.dims.z));
      int32_t y = static_cast<int32_t>((flat / vm.dims.z) % vm.dims.y);
      int32_t z = static_cast<int32_t>(flat % vm.dims.z);
      Vec3 c = vm.center_of({x, y, z});
      double dist_c = (c - origin0).norm();
      for (size_t i = 0; i < dyn_points.size(); ++i) {
        if (dyn_dist[i] < dist_c &&
            point_segment_dist(dyn_points[i], origin0, c) <= diag) {
          unseen[flat] = 1;
          return;
        }
      }
    });
  }

  TargetSet& ts = res.targets;
  ts.extent = extent;
  ts.voxel_edge = voxel_edge;
  ts.targets.reserve(kept.size());
  res.ray_origins.reserve(kept.size());
  for (uint32_t idx : kept) {
    const Cand& c = cands[idx];
    ts.targets.push_back(Target{
        c.pos,
        c.cls != kUnlabeled ? TargetKind::semantic
                            : TargetKind::occupied_unlabeled,
        c.cls});
    res.ray_origins.push_back(c.origin);
  }
  for (int32_t x = 0; x < vm.dims.x; ++x)
    for (int32_t y = 0; y < vm.dims.y; ++y)
      for (int32_t z = 0; z < vm.dims.z; ++z) {
        size_t flat = vm.flat({x, y, z});
        if (occupied[flat]) continue;
        if (unseen[flat])
          ts.unseen_voxels.push_back({x, y, z});
        else if (traversed[flat])
          ts.empty_voxels.push_back({x, y, z});
      }
  return res;
}

}  // namespace scn
