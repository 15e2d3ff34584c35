#pragma once

#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/target_kind.hpp"

namespace scn {

struct Target {
  Vec3 position;
  TargetKind kind = TargetKind::consistency;
  uint16_t class_id = 0;  // 1..N for semantic targets, 0 otherwise
};

/// Labeled training coordinates plus the voxel bookkeeping produced by
/// accumulation. `empty_voxels` were observed at least once as traversed but
/// empty; `unseen_voxels` sit in the occlusion shadow of a dynamic object and
/// are excluded from free-space sampling. The two sets and the set of voxels
/// containing targets are pairwise disjoint.
struct TargetSet {
  std::vector<Target> targets;
  std::vector<VoxelIdx> empty_voxels;   // sorted
  std::vector<VoxelIdx> unseen_voxels;  // sorted
  SceneExtent extent;
  double voxel_edge = 0.2;

  VoxelMap voxel_map() const {
    return VoxelMap::from_extent(extent, voxel_edge);
  }
  size_t count_of(TargetKind k) const;
};

void save_target_set(const TargetSet& t, const std::string& path);
TargetSet load_target_set(const std::string& path);

}  // namespace scn
