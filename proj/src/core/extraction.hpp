#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "core/decoder.hpp"
#include "core/geometry.hpp"
#include "core/latent_grid.hpp"
#include "core/point_cloud.hpp"
#include "core/synth.hpp"
#include "core/trainer.hpp"

namespace scn {

/// Discrete semantic occupancy grid; label 0 means free space.
struct VoxelGrid {
  Vec3 origin;
  double edge = 0.2;
  VoxelIdx dims;
  std::vector<uint16_t> labels;

  size_t flat(int x, int y, int z) const {
    return (static_cast<size_t>(x) * dims.y + y) * dims.z + z;
  }
  uint16_t at(int x, int y, int z) const { return labels[flat(x, y, z)]; }
  size_t voxel_count() const {
    return static_cast<size_t>(dims.x) * dims.y * dims.z;
  }
  bool same_spec(const VoxelGrid& o) const;
};

void save_voxel_grid(const VoxelGrid& g, const std::string& path);
VoxelGrid load_voxel_grid(const std::string& path);

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<uint32_t, 3>> faces;
  std::vector<uint16_t> face_class;  // empty until colored
};

/// Batched evaluation front end over a checkpoint. Pure and safe to share
/// across threads.
class FieldEvaluator {
 public:
  FieldEvaluator(const DecoderParams& params, const LatentGrid& grid)
      : params_(params), grid_(grid) {}

  int logit_dim() const { return params_.logit_dim(); }
  int n_classes() const { return params_.n_classes; }
  const LatentGrid& grid() const { return grid_; }
  const DecoderParams& params() const { return params_; }

  void probs(const Vec3& p, double* out) const;
  double free_prob(const Vec3& p) const;
  FreeSpaceGrad free_with_grad(const Vec3& p) const;

  /// argmax over the semantic classes only (1..N), never free space.
  uint16_t semantic_argmax(const Vec3& p) const;

 private:
  const DecoderParams& params_;
  const LatentGrid& grid_;
};

/// Shared-corner probability cache for a voxel grid: every corner is
/// evaluated exactly once, then any number of thresholds can be applied.
struct CornerField {
  Vec3 origin;
  double edge = 0.2;
  VoxelIdx vox_dims;  // corners per axis = dims + 1
  int k = 0;
  std::vector<double> probs;  // corner-major, k values per corner

  size_t corner_flat(int x, int y, int z) const {
    return (static_cast<size_t>(x) * (vox_dims.y + 1) + y) *
               (vox_dims.z + 1) +
           z;
  }
  const double* at(int x, int y, int z) const {
    return probs.data() + corner_flat(x, y, z) * k;
  }
};

CornerField evaluate_corners(const FieldEvaluator& field, const Vec3& origin,
                             double edge, const VoxelIdx& dims);

/// Corner rule: a corner is occupied iff its free-space probability is below
/// theta_empty; a voxel is occupied iff at least one corner is; the label is
/// the argmax over semantic classes of the mean probability vector of the
/// occupied corners.
VoxelGrid voxelize_from_corners(const CornerField& corners,
                                double theta_empty);

VoxelGrid voxelize(const Checkpoint& ckpt, const Vec3& origin, double edge,
                   const VoxelIdx& dims, double theta_empty);

/// Analytic ground-truth voxelization of a synthetic scene with the same
/// corner rule (containment test, majority class over occupied corners).
VoxelGrid scene_truth_grid(const SyntheticScene& scene, const Vec3& origin,
                           double edge, const VoxelIdx& dims);

/// Scalar field for isosurface extraction; positive outside (free side).
using ScalarField = std::function<double(const Vec3&)>;

struct MeshStats {
  size_t evaluations = 0;  // distinct corner evaluations performed
  size_t active_cells = 0;
};

/// Coarse-to-fine isosurface extraction: only cells whose corners straddle
/// the level set are subdivided down to final_res, then marching cubes runs
/// on the active cells. final_res must be coarse_res times a power of two.
TriMesh mise_mesh_field(const ScalarField& field, const SceneExtent& extent,
                        int coarse_res, int final_res,
                        MeshStats* stats = nullptr);

/// Every final-resolution cell evaluated; reference route for mise_mesh.
TriMesh dense_mesh_field(const ScalarField& field, const SceneExtent& extent,
                         int final_res, MeshStats* stats = nullptr);

TriMesh mise_mesh(const Checkpoint& ckpt, const SceneExtent& extent,
                  double theta_free, int coarse_res, int final_res,
                  MeshStats* stats = nullptr);

/// Projects each vertex toward the theta_free level set along the analytic
/// free-space gradient, then labels each face by the semantic argmax at its
/// centroid.
TriMesh refine_and_color(const Checkpoint& ckpt, const TriMesh& mesh,
                         double theta_free, int iters, double step);

void save_ply(const TriMesh& mesh, const std::string& path,
              const std::vector<std::array<uint8_t, 3>>& palette);

/// Default palette: deterministic distinct colors, index 0 = gray.
std::vector<std::array<uint8_t, 3>> default_palette(int n_classes);

constexpr uint16_t kVoidPixel = 0xffff;

struct GroundImage {
  double min_x = 0.0, min_y = 0.0;
  double cell = 0.2;
  int width = 0, height = 0;
  std::vector<uint16_t> pixels;  // row-major (y major), kVoidPixel = void

  uint16_t at(int ix, int iy) const { return pixels[iy * width + ix]; }
};

/// Segments the input cloud, interpolates the detected ground surface
/// piecewise linearly over its triangulation and queries the field at the
/// interpolated heights. Pixels outside the hull stay void.
GroundImage ground_image(const Checkpoint& ckpt, const PointCloud& cloud,
                         const std::set<uint16_t>& ground_classes,
                         double cell, const SceneExtent& extent,
                         uint64_t seed, size_t max_ground_points = 8000);

void save_ground_image(const GroundImage& img, const std::string& prefix,
                       const std::vector<std::array<uint8_t, 3>>& palette);

/// 2D Delaunay triangulation (Bowyer-Watson). Exposed for tests.
std::vector<std::array<uint32_t, 3>> delaunay_triangulate(
    const std::vector<Vec3>& points_xy);

}  // namespace scn
