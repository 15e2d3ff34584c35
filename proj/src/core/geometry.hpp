#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>

namespace scn {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  double norm2() const { return dot(*this); }
  Vec3 normalized() const {
    double n = norm();
    return n > 0.0 ? *this / n : Vec3{0, 0, 0};
  }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return Mat3{}; }
  static Mat3 rot_z(double yaw) {
    double c = std::cos(yaw), s = std::sin(yaw);
    Mat3 r;
    r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
    return r;
  }

  double operator()(int r, int c) const { return m[r * 3 + c]; }
  double& operator()(int r, int c) { return m[r * 3 + c]; }

  Vec3 apply(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 transposed() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
    return t;
  }
  Mat3 mul(const Mat3& o) const {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += (*this)(r, k) * o(k, c);
        out(r, c) = s;
      }
    return out;
  }
  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) -
           m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
};

/// Rigid transform into the common scene frame.
struct Pose {
  Mat3 rotation;
  Vec3 translation;

  Vec3 apply(const Vec3& p) const { return rotation.apply(p) + translation; }

  /// Orthonormality and det(R)=+1, both within tol.
  bool valid(double tol = 1e-9) const {
    Mat3 rtr = rotation.transposed().mul(rotation);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        double want = (r == c) ? 1.0 : 0.0;
        if (std::abs(rtr(r, c) - want) > tol) return false;
      }
    return std::abs(rotation.det() - 1.0) <= tol;
  }
};

/// Axis-aligned scene bounds, min_corner < max_corner componentwise.
struct SceneExtent {
  Vec3 min_corner;
  Vec3 max_corner;

  bool valid() const {
    return min_corner.x < max_corner.x && min_corner.y < max_corner.y &&
           min_corner.z < max_corner.z;
  }
  bool contains(const Vec3& p) const {
    return p.x >= min_corner.x && p.x <= max_corner.x && p.y >= min_corner.y &&
           p.y <= max_corner.y && p.z >= min_corner.z && p.z <= max_corner.z;
  }
  Vec3 size() const { return max_corner - min_corner; }
  Vec3 center() const { return (min_corner + max_corner) * 0.5; }
};

struct VoxelIdx {
  int32_t x = 0, y = 0, z = 0;
  bool operator==(const VoxelIdx&) const = default;
  bool operator<(const VoxelIdx& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
  }
};

struct VoxelIdxHash {
  size_t operator()(const VoxelIdx& v) const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t k) {
      h ^= k;
      h *= 1099511628211ull;
    };
    mix(static_cast<uint32_t>(v.x));
    mix(static_cast<uint32_t>(v.y));
    mix(static_cast<uint32_t>(v.z));
    return static_cast<size_t>(h);
  }
};

/// Maps positions to voxel indices on a grid anchored at `origin`.
struct VoxelMap {
  Vec3 origin;
  double edge = 0.2;
  VoxelIdx dims;  // number of voxels per axis

  static VoxelMap from_extent(const SceneExtent& e, double edge) {
    VoxelMap m;
    m.origin = e.min_corner;
    m.edge = edge;
    Vec3 s = e.size();
    m.dims = {static_cast<int32_t>(std::ceil(s.x / edge - 1e-9)),
              static_cast<int32_t>(std::ceil(s.y / edge - 1e-9)),
              static_cast<int32_t>(std::ceil(s.z / edge - 1e-9))};
    return m;
  }

  VoxelIdx index_of(const Vec3& p) const {
    return {static_cast<int32_t>(std::floor((p.x - origin.x) / edge)),
            static_cast<int32_t>(std::floor((p.y - origin.y) / edge)),
            static_cast<int32_t>(std::floor((p.z - origin.z) / edge))};
  }
  bool in_bounds(const VoxelIdx& v) const {
    return v.x >= 0 && v.x < dims.x && v.y >= 0 && v.y < dims.y && v.z >= 0 &&
           v.z < dims.z;
  }
  Vec3 center_of(const VoxelIdx& v) const {
    return {origin.x + (v.x + 0.5) * edge, origin.y + (v.y + 0.5) * edge,
            origin.z + (v.z + 0.5) * edge};
  }
  Vec3 corner_of(const VoxelIdx& v) const {
    return {origin.x + v.x * edge, origin.y + v.y * edge,
            origin.z + v.z * edge};
  }
  size_t voxel_count() const {
    return static_cast<size_t>(dims.x) * dims.y * dims.z;
  }
  size_t flat(const VoxelIdx& v) const {
    return (static_cast<size_t>(v.x) * dims.y + v.y) * dims.z + v.z;
  }
};

}  // namespace scn
