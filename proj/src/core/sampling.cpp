#include "core/sampling.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace scn {

Vec3 sample_ray_free(const Vec3& point, const Vec3& origin, double decay_scale,
                     Rng& rng) {
  if (!(decay_scale > 0.0))
    fail(ErrorCode::argument, "decay scale must be > 0");
  Vec3 d = origin - point;
  double len = d.norm();
  if (len <= decay_scale * 1e-3)
    fail(ErrorCode::argument, "degenerate zero-length ray");
  double dist;
  do {
    dist = rng.exponential(decay_scale);
  } while (dist <= 0.0 || dist >= len);
  return point + d * (dist / len);
}

std::vector<Target> sample_empty_voxels(std::span<const VoxelIdx> empty_voxels,
                                        const VoxelMap& vm, Rng& rng) {
  if (!(vm.edge > 0.0)) fail(ErrorCode::argument, "voxel edge must be > 0");
  std::vector<Target> out;
  out.reserve(empty_voxels.size());
  for (const VoxelIdx& v : empty_voxels) {
    Vec3 corner = vm.corner_of(v);
    Vec3 p{corner.x + vm.edge * rng.uniform(),
           corner.y + vm.edge * rng.uniform(),
           corner.z + vm.edge * rng.uniform()};
    out.push_back(Target{p, TargetKind::free_space, 0});
  }
  return out;
}

std::vector<Target> sample_consistency(const SceneExtent& extent, size_t count,
                                       Rng& rng) {
  if (!extent.valid()) fail(ErrorCode::argument, "invalid extent");
  std::vector<Target> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Vec3 p{rng.uniform(extent.min_corner.x, extent.max_corner.x),
           rng.uniform(extent.min_corner.y, extent.max_corner.y),
           rng.uniform(extent.min_corner.z, extent.max_corner.z)};
    out.push_back(Target{p, TargetKind::consistency, 0});
  }
  return out;
}

TrainingBatch build_batch(const TargetSet& targets, size_t max_targets,
                          bool two_of_four, Rng& rng) {
  if (targets.targets.empty())
    fail(ErrorCode::argument, "cannot build a batch from an empty target set");
  if (max_targets < 1) fail(ErrorCode::argument, "max_targets must be >= 1");

  size_t n = targets.targets.size();
  std::vector<uint32_t> idx;
  if (n <= max_targets) {
    idx.resize(n);
    for (size_t i = 0; i < n; ++i) idx[i] = static_cast<uint32_t>(i);
  } else {
    idx.resize(n);
    for (size_t i = 0; i < n; ++i) idx[i] = static_cast<uint32_t>(i);
    for (size_t j = 0; j < max_targets; ++j) {
      size_t pick = j + rng.below(n - j);
      std::swap(idx[j], idx[pick]);
    }
    idx.resize(max_targets);
  }

  static constexpr uint8_t kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                           {1, 2}, {1, 3}, {2, 3}};
  TrainingBatch batch;
  batch.entries.reserve(idx.size());
  for (uint32_t i : idx) {
    TrainingBatch::Entry e;
    e.target_index = i;
    if (two_of_four) {
      const uint8_t* pair = kPairs[rng.below(6)];
      e.support_a = pair[0];
      e.support_b = pair[1];
    }
    batch.entries.push_back(e);
  }
  return batch;
}

SampledTargets assemble_target_set(const AccumulateResult& acc,
                                   const GridConfig& grid,
                                   const SamplingConfig& cfg, uint64_t seed) {
  SampledTargets out;
  TargetSet& ts = out.set;
  ts.extent = acc.targets.extent;
  ts.voxel_edge = acc.targets.voxel_edge;
  ts.empty_voxels = acc.targets.empty_voxels;
  ts.unseen_voxels = acc.targets.unseen_voxels;
  VoxelMap vm = ts.voxel_map();

  auto keep = [&](const Target& t) {
    if (in_grid_domain(t.position, grid)) {
      ts.targets.push_back(t);
      return true;
    }
    ++out.dropped_out_of_domain;
    return false;
  };

  // surface targets and one carved free-space sample per retained ray
  Rng ray_rng = Rng::stream(seed, "sample.ray_free");
  for (size_t i = 0; i < acc.targets.targets.size(); ++i) {
    const Target& t = acc.targets.targets[i];
    keep(t);
    const Vec3& origin = acc.ray_origins[i];
    double len = (origin - t.position).norm();
    if (len > cfg.decay_scale * 1e-3) {
      Vec3 p = sample_ray_free(t.position, origin, cfg.decay_scale, ray_rng);
      keep(Target{p, TargetKind::free_space, 0});
    }
  }

  Rng voxel_rng = Rng::stream(seed, "sample.empty_voxels");
  for (Target& t :
       sample_empty_voxels(ts.empty_voxels, vm, voxel_rng))
    keep(t);

  Rng cons_rng = Rng::stream(seed, "sample.consistency");
  for (Target& t :
       sample_consistency(ts.extent, cfg.consistency_count, cons_rng))
    keep(t);

  return out;
}

}  // namespace scn
