#include "core/point_cloud.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "core/error.hpp"

namespace scn {

namespace {

std::vector<uint8_t> read_all(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) fail(ErrorCode::io, "cannot open: " + path);
  std::streamsize size = f.tellg();
  f.seekg(0);
  std::vector<uint8_t> bytes(static_cast<size_t>(size));
  f.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!f) fail(ErrorCode::io, "read failed: " + path);
  return bytes;
}

}  // namespace

PointCloud load_scan(const std::string& path) {
  std::vector<uint8_t> bytes = read_all(path);
  if (bytes.size() % 16 != 0)
    fail(ErrorCode::format,
         path + ": truncated scan, size " + std::to_string(bytes.size()) +
             " is not a multiple of 16");
  size_t n = bytes.size() / 16;
  PointCloud cloud;
  cloud.points.resize(n);
  for (size_t i = 0; i < n; ++i) {
    float rec[4];
    std::memcpy(rec, bytes.data() + i * 16, 16);
    for (float v : rec)
      if (!std::isfinite(v))
        fail(ErrorCode::data,
             path + ": non-finite value in record " + std::to_string(i));
    cloud.points[i].position = {rec[0], rec[1], rec[2]};
    float r = rec[3];
    cloud.points[i].reflectivity = r < 0.0f ? 0.0f : (r > 1.0f ? 1.0f : r);
  }
  return cloud;
}

void save_scan(const PointCloud& cloud, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::io, "cannot open for writing: " + path);
  for (const auto& p : cloud.points) {
    float rec[4] = {static_cast<float>(p.position.x),
                    static_cast<float>(p.position.y),
                    static_cast<float>(p.position.z), p.reflectivity};
    f.write(reinterpret_cast<const char*>(rec), 16);
  }
  if (!f) fail(ErrorCode::io, "write failed: " + path);
}

std::vector<uint16_t> load_labels(const std::string& path, size_t n_points,
                                  const ClassMap& map) {
  std::vector<uint8_t> bytes = read_all(path);
  if (bytes.size() != n_points * 4)
    fail(ErrorCode::format,
         path + ": expected " + std::to_string(n_points) + " label records, " +
             "file holds " + std::to_string(bytes.size() / 4));
  std::vector<uint16_t> out(n_points);
  for (size_t i = 0; i < n_points; ++i) {
    uint32_t raw;
    std::memcpy(&raw, bytes.data() + i * 4, 4);
    out[i] = map.lookup(raw);
  }
  return out;
}

void save_labels(const std::vector<uint16_t>& classes, const ClassMap& map,
                 const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::io, "cannot open for writing: " + path);
  for (uint16_t cls : classes) {
    uint32_t raw = cls == kUnlabeled ? 0 : map.raw_of(cls);
    f.write(reinterpret_cast<const char*>(&raw), 4);
  }
  if (!f) fail(ErrorCode::io, "write failed: " + path);
}

}  // namespace scn
