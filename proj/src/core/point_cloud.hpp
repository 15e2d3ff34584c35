#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/class_map.hpp"
#include "core/geometry.hpp"

namespace scn {

/// Raw sensor returns in a right-handed metric frame plus the sensor origin.
struct PointCloud {
  struct Point {
    Vec3 position;
    float reflectivity = 0.0f;  // in [0,1]
  };
  std::vector<Point> points;
  Vec3 sensor_origin;
};

/// Reads 16-byte records of four little-endian float32 (x, y, z,
/// reflectivity). The sensor origin defaults to (0,0,0). Reflectivity values
/// outside [0,1] are normalized by clamping.
PointCloud load_scan(const std::string& path);

void save_scan(const PointCloud& cloud, const std::string& path);

/// Reads one uint32 per point (lower 16 bits carry the raw class id) and maps
/// it through `map`. Fails unless the file holds exactly n_points records.
std::vector<uint16_t> load_labels(const std::string& path, size_t n_points,
                                  const ClassMap& map);

/// Writes class ids back to raw label records via the inverse map.
void save_labels(const std::vector<uint16_t>& classes, const ClassMap& map,
                 const std::string& path);

}  // namespace scn
