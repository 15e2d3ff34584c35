#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/accumulate.hpp"
#include "core/geometry.hpp"
#include "core/latent_grid.hpp"
#include "core/rng.hpp"
#include "core/targets.hpp"

namespace scn {

/// Free-space sample on the open segment (origin, point). The distance from
/// `point` back toward `origin` follows an exponential distribution with the
/// given scale, truncated at the segment length by rejection, so samples
/// concentrate just in front of the measured surface.
Vec3 sample_ray_free(const Vec3& point, const Vec3& origin, double decay_scale,
                     Rng& rng);

/// Exactly one uniformly placed free-space target per observed-empty voxel.
std::vector<Target> sample_empty_voxels(std::span<const VoxelIdx> empty_voxels,
                                        const VoxelMap& vm, Rng& rng);

/// `count` positions uniform over the extent, consistency supervision only.
std::vector<Target> sample_consistency(const SceneExtent& extent, size_t count,
                                       Rng& rng);

/// One subsampled training step. When a support pair is set, only those two
/// of the four supports are evaluated and their bilinear weights are doubled,
/// keeping the composed prediction unbiased in expectation.
struct TrainingBatch {
  struct Entry {
    uint32_t target_index;
    uint8_t support_a = 255;  // 255 = all four supports
    uint8_t support_b = 255;
  };
  std::vector<Entry> entries;
};

TrainingBatch build_batch(const TargetSet& targets, size_t max_targets,
                          bool two_of_four, Rng& rng);

/// Full sampling pipeline: accumulated surface targets plus ray free-space
/// samples (one per retained surface point), per-empty-voxel free-space
/// samples and uniform consistency points. Targets falling outside the grid
/// footprint are dropped and counted.
struct SamplingConfig {
  double decay_scale = 0.25;
  size_t consistency_count = 2500;
};

struct SampledTargets {
  TargetSet set;
  size_t dropped_out_of_domain = 0;
};

SampledTargets assemble_target_set(const AccumulateResult& acc,
                                   const GridConfig& grid,
                                   const SamplingConfig& cfg, uint64_t seed);

}  // namespace scn
