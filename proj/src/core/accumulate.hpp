#pragma once

#include <span>
#include <vector>

#include "core/geometry.hpp"
#include "core/point_cloud.hpp"
#include "core/targets.hpp"

namespace scn {

/// One input scan with its pose into the reference frame, per-point class ids
/// (0 = unlabeled) and per-point dynamic-object flags.
struct ScanInput {
  PointCloud cloud;
  Pose pose;
  std::vector<uint16_t> labels;
  std::vector<uint8_t> dynamic;  // may be empty (all static)
};

/// 3D digital differential analyzer. Walks the segment a->b through the voxel
/// grid and returns the traversed voxel indices in order, clipped to the grid
/// bounds. The voxel containing b is excluded unless include_end is set.
std::vector<VoxelIdx> traverse_ray(const VoxelMap& vm, const Vec3& a,
                                   const Vec3& b, bool include_end = false);

struct AccumulateResult {
  TargetSet targets;
  /// Sensor origin (reference frame) per retained target, for ray free-space
  /// sampling.
  std::vector<Vec3> ray_origins;
  size_t points_dropped_dynamic = 0;
  size_t points_dropped_cap = 0;
};

/// Accumulates the scans into a single static-scene target set:
///  - transformed points inside the extent become semantic targets,
///  - dynamic points are kept only from the first scan (later ones dropped),
///  - voxels occluded by a first-scan dynamic object are marked unseen:
///    the segment from the first sensor origin to the voxel center passes
///    within one voxel diagonal of a dynamic point that is closer to the
///    sensor than the voxel,
///  - at most `cap_per_voxel` targets are retained per voxel (uniform),
///  - traversed-but-empty voxels are recorded for free-space sampling.
/// Precedence when sets overlap: occupied > unseen > empty.
AccumulateResult accumulate(std::span<const ScanInput> scans,
                            const SceneExtent& extent, double voxel_edge,
                            uint64_t seed, int cap_per_voxel = 10);

}  // namespace scn
