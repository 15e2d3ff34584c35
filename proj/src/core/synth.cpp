#include "core/synth.hpp"

#include <algorithm>
#include <cmath>

#include "core/container.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/threading.hpp"

namespace scn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double box_sdf(const Vec3& half, const Vec3& q) {
  Vec3 d{std::abs(q.x) - half.x, std::abs(q.y) - half.y,
         std::abs(q.z) - half.z};
  Vec3 dp{std::max(d.x, 0.0), std::max(d.y, 0.0), std::max(d.z, 0.0)};
  double inside = std::min(std::max(d.x, std::max(d.y, d.z)), 0.0);
  return dp.norm() + inside;
}

double cylinder_sdf(double radius, double half_h, const Vec3& q) {
  double dxy = std::hypot(q.x, q.y) - radius;
  double dz = std::abs(q.z) - half_h;
  double outside = std::hypot(std::max(dxy, 0.0), std::max(dz, 0.0));
  double inside = std::min(std::max(dxy, dz), 0.0);
  return outside + inside;
}

/// Nearest ray-primitive intersection parameter in (eps, t_best), or kInf.
double intersect(const ScenePrimitive& prim, const Vec3& o, const Vec3& dir) {
  constexpr double eps = 1e-9;
  switch (prim.kind) {
    case ScenePrimitive::Kind::ground: {
      double z0 = prim.pose.translation.z;
      if (std::abs(dir.z) < 1e-15) return kInf;
      double t = (z0 - o.z) / dir.z;
      return t > eps ? t : kInf;
    }
    case ScenePrimitive::Kind::box: {
      Mat3 rt = prim.pose.rotation.transposed();
      Vec3 ol = rt.apply(o - prim.pose.translation);
      Vec3 dl = rt.apply(dir);
      Vec3 half = prim.dims * 0.5;
      double t0 = -kInf, t1 = kInf;
      for (int ax = 0; ax < 3; ++ax) {
        double olx = ol[ax], dlx = dl[ax], h = half[ax];
        if (std::abs(dlx) < 1e-15) {
          if (olx < -h || olx > h) return kInf;
        } else {
          double ta = (-h - olx) / dlx;
          double tb = (h - olx) / dlx;
          if (ta > tb) std::swap(ta, tb);
          t0 = std::max(t0, ta);
          t1 = std::min(t1, tb);
        }
      }
      if (t0 > t1) return kInf;
      return t0 > eps ? t0 : kInf;
    }
    case ScenePrimitive::Kind::cylinder: {
      Vec3 ol = o - prim.pose.translation;
      double r = prim.dims.x;
      double hh = prim.dims.z * 0.5;
      double best = kInf;
      // lateral surface
      double a = dir.x * dir.x + dir.y * dir.y;
      if (a > 1e-15) {
        double b = 2.0 * (ol.x * dir.x + ol.y * dir.y);
        double c = ol.x * ol.x + ol.y * ol.y - r * r;
        double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
          double sq = std::sqrt(disc);
          for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
            if (t > eps && t < best) {
              double z = ol.z + t * dir.z;
              if (std::abs(z) <= hh) best = t;
            }
          }
        }
      }
      // caps
      if (std::abs(dir.z) > 1e-15) {
        for (double zc : {-hh, hh}) {
          double t = (zc - ol.z) / dir.z;
          if (t > eps && t < best) {
            double x = ol.x + t * dir.x;
            double y = ol.y + t * dir.y;
            if (x * x + y * y <= r * r) best = t;
          }
        }
      }
      return best;
    }
  }
  return kInf;
}

double object_radius_xy(const ScenePrimitive& prim) {
  if (prim.kind == ScenePrimitive::Kind::box)
    return 0.5 * std::hypot(prim.dims.x, prim.dims.y);
  return prim.dims.x;
}

}  // namespace

double primitive_sdf(const ScenePrimitive& prim, const Vec3& p) {
  switch (prim.kind) {
    case ScenePrimitive::Kind::ground:
      return p.z - prim.pose.translation.z;
    case ScenePrimitive::Kind::box: {
      Vec3 q = prim.pose.rotation.transposed().apply(p - prim.pose.translation);
      return box_sdf(prim.dims * 0.5, q);
    }
    case ScenePrimitive::Kind::cylinder:
      return cylinder_sdf(prim.dims.x, prim.dims.z * 0.5,
                          p - prim.pose.translation);
  }
  return kInf;
}

SyntheticScene generate_scene(uint64_t seed, const SynthSpec& spec) {
  if (spec.boxes < 0 || spec.cylinders < 0)
    fail(ErrorCode::argument, "object counts must be >= 0");
  if (!spec.extent.valid()) fail(ErrorCode::argument, "invalid extent");

  SyntheticScene scene;
  scene.extent = spec.extent;
  scene.seed = seed;
  scene.shell = spec.shell;

  ScenePrimitive ground;
  ground.kind = ScenePrimitive::Kind::ground;
  ground.class_id = spec.ground_class;
  ground.pose.translation = {0, 0, 0};
  scene.primitives.push_back(ground);

  Rng rng = Rng::stream(seed, "synth.objects");
  const double x0 = spec.extent.min_corner.x + spec.margin;
  const double x1 = spec.extent.max_corner.x - spec.margin;
  const double y0 = spec.extent.min_corner.y + spec.margin;
  const double y1 = spec.extent.max_corner.y - spec.margin;
  if (x0 >= x1 || y0 >= y1)
    fail(ErrorCode::data, "extent too small for the requested margin");

  auto try_place = [&](ScenePrimitive prim) -> bool {
    double r = object_radius_xy(prim);
    for (size_t i = 1; i < scene.primitives.size(); ++i) {
      const ScenePrimitive& other = scene.primitives[i];
      Vec3 d = prim.pose.translation - other.pose.translation;
      double min_dist = r + object_radius_xy(other) + spec.min_gap;
      if (std::hypot(d.x, d.y) < min_dist) return false;
    }
    for (const Vec3& c : spec.keep_clear) {
      Vec3 d = prim.pose.translation - c;
      if (std::hypot(d.x, d.y) < r + spec.clear_radius) return false;
    }
    scene.primitives.push_back(prim);
    return true;
  };

  constexpr int kRetries = 500;
  auto place_n = [&](int count, auto make) {
    for (int i = 0; i < count; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < kRetries && !placed; ++attempt) {
        ScenePrimitive prim = make();
        prim.pose.translation.x = rng.uniform(x0, x1);
        prim.pose.translation.y = rng.uniform(y0, y1);
        placed = try_place(prim);
      }
      if (!placed)
        fail(ErrorCode::data,
             "cannot place requested object count without overlap");
    }
  };

  place_n(spec.boxes, [&] {
    ScenePrimitive p;
    p.kind = ScenePrimitive::Kind::box;
    p.class_id = spec.box_class;
    p.dims = {rng.uniform(spec.box_xy_min, spec.box_xy_max),
              rng.uniform(spec.box_xy_min, spec.box_xy_max),
              rng.uniform(spec.box_h_min, spec.box_h_max)};
    p.pose.rotation = Mat3::rot_z(rng.uniform(0.0, 2.0 * M_PI));
    p.pose.translation.z = p.dims.z * 0.5;  // resting on the ground
    return p;
  });
  place_n(spec.cylinders, [&] {
    ScenePrimitive p;
    p.kind = ScenePrimitive::Kind::cylinder;
    p.class_id = spec.cylinder_class;
    double r = rng.uniform(spec.cyl_r_min, spec.cyl_r_max);
    double h = rng.uniform(spec.cyl_h_min, spec.cyl_h_max);
    p.dims = {r, r, h};
    p.pose.translation.z = h * 0.5;
    return p;
  });
  return scene;
}

uint16_t ground_truth_class(const SyntheticScene& scene, const Vec3& p,
                            double shell) {
  if (!p.finite()) fail(ErrorCode::argument, "query must be finite");
  for (const ScenePrimitive& prim : scene.primitives)
    if (primitive_sdf(prim, p) <= shell) return prim.class_id;
  return 0;
}

uint16_t ground_truth_class(const SyntheticScene& scene, const Vec3& p) {
  return ground_truth_class(scene, p, scene.shell);
}

SimulatedScan simulate_scan(const SyntheticScene& scene,
                            const Pose& sensor_pose,
                            const ScanPattern& pattern) {
  if (pattern.azimuth_count < 1 || pattern.elevation_count < 1)
    fail(ErrorCode::argument, "angular counts must be >= 1");
  if (!sensor_pose.valid())
    fail(ErrorCode::argument, "sensor pose not a rigid motion");
  Vec3 origin = sensor_pose.translation;
  for (const ScenePrimitive& prim : scene.primitives)
    if (primitive_sdf(prim, origin) <= 0.0)
      fail(ErrorCode::argument, "sensor placed inside a primitive");

  const double el_min = pattern.elevation_min_deg * M_PI / 180.0;
  const double el_max = pattern.elevation_max_deg * M_PI / 180.0;
  size_t total =
      static_cast<size_t>(pattern.azimuth_count) * pattern.elevation_count;

  struct Hit {
    bool valid = false;
    Vec3 p_sensor;
    uint16_t cls = 0;
    float refl = 0.0f;
  };
  std::vector<Hit> hits(total);
  Mat3 rt = sensor_pose.rotation.transposed();
  parallel_for(total, [&](size_t idx) {
    int ei = static_cast<int>(idx / pattern.azimuth_count);
    int ai = static_cast<int>(idx % pattern.azimuth_count);
    double el =
        el_min + (ei + 0.5) * (el_max - el_min) / pattern.elevation_count;
    double az = -M_PI + (ai + 0.5) * 2.0 * M_PI / pattern.azimuth_count;
    Vec3 dir_s{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
               std::sin(el)};
    Vec3 dir = sensor_pose.rotation.apply(dir_s);
    double best = kInf;
    uint16_t cls = 0;
    for (const ScenePrimitive& prim : scene.primitives) {
      double t = intersect(prim, origin, dir);
      if (t < best) {
        best = t;
        cls = prim.class_id;
      }
    }
    if (best <= pattern.range_max) {
      Vec3 pw = origin + dir * best;
      hits[idx].valid = true;
      hits[idx].p_sensor = rt.apply(pw - origin);
      hits[idx].cls = cls;
      hits[idx].refl = static_cast<float>(
          0.1 + 0.8 * (cls % 10) / 10.0);  // per-class constant
    }
  });

  SimulatedScan out;
  out.cloud.sensor_origin = {0, 0, 0};
  for (const Hit& h : hits) {
    if (!h.valid) continue;
    out.cloud.points.push_back({h.p_sensor, h.refl});
    out.classes.push_back(h.cls);
  }
  return out;
}

void save_scene(const SyntheticScene& scene, const std::string& path) {
  Container c;
  c.add_string("kind", "synthetic_scene");
  std::vector<double> ext{scene.extent.min_corner.x, scene.extent.min_corner.y,
                          scene.extent.min_corner.z, scene.extent.max_corner.x,
                          scene.extent.max_corner.y,
                          scene.extent.max_corner.z};
  c.add_f64("extent", ext);
  c.add_scalar_u64("seed", scene.seed);
  c.add_scalar_f64("shell", scene.shell);
  size_t n = scene.primitives.size();
  std::vector<uint8_t> kinds(n);
  std::vector<uint16_t> classes(n);
  std::vector<double> geo(n * 15);
  for (size_t i = 0; i < n; ++i) {
    const ScenePrimitive& p = scene.primitives[i];
    kinds[i] = static_cast<uint8_t>(p.kind);
    classes[i] = p.class_id;
    for (int j = 0; j < 9; ++j) geo[i * 15 + j] = p.pose.rotation.m[j];
    geo[i * 15 + 9] = p.pose.translation.x;
    geo[i * 15 + 10] = p.pose.translation.y;
    geo[i * 15 + 11] = p.pose.translation.z;
    geo[i * 15 + 12] = p.dims.x;
    geo[i * 15 + 13] = p.dims.y;
    geo[i * 15 + 14] = p.dims.z;
  }
  c.add_u8("prim_kinds", kinds);
  c.add_u16("prim_classes", classes);
  c.add_f64("prim_geometry", geo, {n, 15});
  c.save(path);
}

SyntheticScene load_scene(const std::string& path) {
  Container c = Container::load(path);
  if (c.get_string("kind") != "synthetic_scene")
    fail(ErrorCode::format, path + ": not a scene file");
  SyntheticScene s;
  auto ext = c.get_f64("extent");
  if (ext.size() != 6) fail(ErrorCode::format, path + ": bad extent");
  s.extent.min_corner = {ext[0], ext[1], ext[2]};
  s.extent.max_corner = {ext[3], ext[4], ext[5]};
  s.seed = c.get_scalar_u64("seed");
  s.shell = c.get_scalar_f64("shell");
  auto kinds = c.get_u8("prim_kinds");
  auto classes = c.get_u16("prim_classes");
  auto geo = c.get_f64("prim_geometry");
  if (classes.size() != kinds.size() || geo.size() != kinds.size() * 15)
    fail(ErrorCode::format, path + ": primitive arrays disagree");
  s.primitives.resize(kinds.size());
  for (size_t i = 0; i < kinds.size(); ++i) {
    ScenePrimitive& p = s.primitives[i];
    if (kinds[i] > static_cast<uint8_t>(ScenePrimitive::Kind::cylinder))
      fail(ErrorCode::data, path + ": bad primitive kind");
    p.kind = static_cast<ScenePrimitive::Kind>(kinds[i]);
    p.class_id = classes[i];
    for (int j = 0; j < 9; ++j) p.pose.rotation.m[j] = geo[i * 15 + j];
    p.pose.translation = {geo[i * 15 + 9], geo[i * 15 + 10], geo[i * 15 + 11]};
    p.dims = {geo[i * 15 + 12], geo[i * 15 + 13], geo[i * 15 + 14]};
  }
  return s;
}

}  // namespace scn
