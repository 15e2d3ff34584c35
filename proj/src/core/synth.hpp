#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/point_cloud.hpp"

namespace scn {

/// Parametric solid with a class label. The ground plane is the half-space
/// below z = pose.translation.z; boxes are yaw-rotated cuboids centered at
/// the pose translation with full edge lengths `dims`; cylinders stand
/// upright with radius dims.x and height dims.z.
struct ScenePrimitive {
  enum class Kind : uint8_t { ground = 0, box = 1, cylinder = 2 };
  Kind kind = Kind::ground;
  uint16_t class_id = 1;
  Pose pose;
  Vec3 dims{1, 1, 1};
};

struct SyntheticScene {
  std::vector<ScenePrimitive> primitives;
  SceneExtent extent;
  uint64_t seed = 0;
  double shell = 0.05;  // surface-shell thickness for the point oracle
};

struct SynthSpec {
  SceneExtent extent;
  int boxes = 6;
  int cylinders = 4;
  double box_xy_min = 0.8, box_xy_max = 2.5;
  double box_h_min = 0.8, box_h_max = 2.2;
  double cyl_r_min = 0.3, cyl_r_max = 0.8;
  double cyl_h_min = 1.0, cyl_h_max = 2.5;
  uint16_t ground_class = 1;
  uint16_t box_class = 2;
  uint16_t cylinder_class = 3;
  double margin = 1.0;     // object distance from the extent boundary
  double min_gap = 0.25;   // pairwise xy separation between objects
  double shell = 0.05;
  std::vector<Vec3> keep_clear;    // e.g. sensor positions
  double clear_radius = 1.0;
};

/// Signed distance to the primitive surface (negative inside).
double primitive_sdf(const ScenePrimitive& prim, const Vec3& p);

/// Deterministic scene generation: one ground plane at z=0 plus
/// non-overlapping boxes and cylinders. Fails when the requested density
/// cannot be placed within bounded retries.
SyntheticScene generate_scene(uint64_t seed, const SynthSpec& spec);

/// Class id of the containing primitive (surface shell included), first hit
/// in list order; 0 = free space.
uint16_t ground_truth_class(const SyntheticScene& scene, const Vec3& p);
uint16_t ground_truth_class(const SyntheticScene& scene, const Vec3& p,
                            double shell);

struct SimulatedScan {
  PointCloud cloud;               // points in the sensor frame
  std::vector<uint16_t> classes;  // hit primitive class per point
};

struct ScanPattern {
  int azimuth_count = 600;
  int elevation_count = 48;
  double elevation_min_deg = -80.0;
  double elevation_max_deg = 30.0;
  double range_max = 120.0;
};

/// Casts one ray per angular cell and keeps the nearest hit. Rays without a
/// hit produce no return. Reflectivity is a per-class constant. Fails when
/// the sensor sits inside a primitive.
SimulatedScan simulate_scan(const SyntheticScene& scene,
                            const Pose& sensor_pose,
                            const ScanPattern& pattern);

void save_scene(const SyntheticScene& scene, const std::string& path);
SyntheticScene load_scene(const std::string& path);

}  // namespace scn
