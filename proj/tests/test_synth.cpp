#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "test_util.hpp"

using namespace scn;

namespace {
SynthSpec base_spec() {
  SynthSpec spec;
  spec.extent = SceneExtent{{-10, -10, -0.5}, {10, 10, 3.0}};
  return spec;
}
}  // namespace

TEST_CASE("empty spec yields only the ground plane, deterministically") {
  SynthSpec spec = base_spec();
  spec.boxes = 0;
  spec.cylinders = 0;
  SyntheticScene s = generate_scene(7, spec);
  REQUIRE(s.primitives.size() == 1);
  CHECK(s.primitives[0].kind == ScenePrimitive::Kind::ground);

  std::string dir = testutil::temp_dir("synth_det");
  spec.boxes = 5;
  spec.cylinders = 3;
  save_scene(generate_scene(42, spec), dir + "/a.scn");
  save_scene(generate_scene(42, spec), dir + "/b.scn");
  CHECK(testutil::read_file(dir + "/a.scn") ==
        testutil::read_file(dir + "/b.scn"));
}

TEST_CASE("generated objects are pairwise separated") {
  SynthSpec spec = base_spec();
  spec.boxes = 5;
  spec.cylinders = 0;
  SyntheticScene s = generate_scene(3, spec);
  REQUIRE(s.primitives.size() == 6);
  // exhaustive pairwise check on sampled boundary points
  Rng rng(5);
  for (size_t i = 1; i < s.primitives.size(); ++i)
    for (size_t j = i + 1; j < s.primitives.size(); ++j) {
      // sample points of primitive i, none may fall inside primitive j
      const ScenePrimitive& a = s.primitives[i];
      const ScenePrimitive& b = s.primitives[j];
      for (int rep = 0; rep < 2000; ++rep) {
        Vec3 q{rng.uniform(-0.5, 0.5) * a.dims.x,
               rng.uniform(-0.5, 0.5) * a.dims.y,
               rng.uniform(-0.5, 0.5) * a.dims.z};
        Vec3 p = a.pose.apply(q);
        CHECK(primitive_sdf(b, p) > 0.0);
      }
    }
  // infeasible density errors out
  SynthSpec dense = base_spec();
  dense.boxes = 100000;
  CHECK_THROWS_AS(generate_scene(1, dense), Error);
}

TEST_CASE("simulated rays hit analytic surfaces") {
  SynthSpec spec = base_spec();
  spec.boxes = 0;
  spec.cylinders = 0;
  SyntheticScene scene = generate_scene(1, spec);

  // single downward ray from (0,0,2) onto the ground plane
  Pose sensor;
  sensor.translation = {0, 0, 2.0};
  ScanPattern pat;
  pat.azimuth_count = 1;
  pat.elevation_count = 1;
  pat.elevation_min_deg = -90.0;
  pat.elevation_max_deg = -90.0;
  SimulatedScan scan = simulate_scan(scene, sensor, pat);
  REQUIRE(scan.cloud.points.size() == 1);
  Vec3 world = scan.cloud.points[0].position + sensor.translation;
  CHECK(std::abs(world.x) < 1e-9);
  CHECK(std::abs(world.y) < 1e-9);
  CHECK(std::abs(world.z) < 1e-9);
  CHECK(scan.classes[0] == spec.ground_class);

  // ray along +x into a box spanning x in [3,4]: nearest face wins
  SyntheticScene box_scene = scene;
  ScenePrimitive box;
  box.kind = ScenePrimitive::Kind::box;
  box.class_id = 2;
  box.pose.translation = {3.5, 0.0, 1.0};
  box.dims = {1.0, 2.0, 2.0};
  box_scene.primitives.push_back(box);
  Pose sensor2;
  sensor2.translation = {0, 0, 1.0};
  ScanPattern pat2;
  pat2.azimuth_count = 1;  // single cell centered on +x
  pat2.elevation_count = 1;
  pat2.elevation_min_deg = 0.0;
  pat2.elevation_max_deg = 0.0;
  SimulatedScan scan2 = simulate_scan(box_scene, sensor2, pat2);
  bool hit_face = false;
  for (size_t i = 0; i < scan2.cloud.points.size(); ++i) {
    Vec3 w = scan2.cloud.points[i].position + sensor2.translation;
    if (scan2.classes[i] == 2) {
      hit_face = true;
      CHECK(w.x == doctest::Approx(3.0).epsilon(1e-12));
    }
  }
  CHECK(hit_face);
}

TEST_CASE("dense cylinder scan lies on the implicit surface") {
  SynthSpec spec = base_spec();
  spec.boxes = 0;
  spec.cylinders = 0;
  SyntheticScene scene = generate_scene(1, spec);
  ScenePrimitive cyl;
  cyl.kind = ScenePrimitive::Kind::cylinder;
  cyl.class_id = 3;
  cyl.pose.translation = {4.0, 0.0, 1.0};
  cyl.dims = {0.8, 0.8, 2.0};
  scene.primitives.push_back(cyl);

  Pose sensor;
  sensor.translation = {0, 0, 1.2};
  ScanPattern pat;
  pat.azimuth_count = 256;
  pat.elevation_count = 32;
  pat.elevation_min_deg = -40;
  pat.elevation_max_deg = 40;
  SimulatedScan scan = simulate_scan(scene, sensor, pat);
  size_t on_cyl = 0;
  for (size_t i = 0; i < scan.cloud.points.size(); ++i) {
    if (scan.classes[i] != 3) continue;
    ++on_cyl;
    Vec3 w = scan.cloud.points[i].position + sensor.translation;
    CHECK(std::abs(primitive_sdf(cyl, w)) <= 1e-9);
  }
  CHECK(on_cyl > 100);

  // sensor inside a primitive is rejected
  Pose inside;
  inside.translation = {4.0, 0.0, 1.0};
  CHECK_THROWS_AS(simulate_scan(scene, inside, pat), Error);
}

TEST_CASE("point oracle: containment, free space, brute-force agreement") {
  SynthSpec spec = base_spec();
  spec.boxes = 4;
  spec.cylinders = 3;
  SyntheticScene scene = generate_scene(9, spec);

  const ScenePrimitive& box = scene.primitives[1];
  CHECK(ground_truth_class(scene, box.pose.translation) == box.class_id);
  CHECK(ground_truth_class(scene, {0, 0, 100.0}) == 0);

  Rng rng(21);
  for (int rep = 0; rep < 100000; ++rep) {
    Vec3 p{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-0.5, 3.0)};
    uint16_t got = ground_truth_class(scene, p);
    uint16_t want = 0;
    for (const ScenePrimitive& prim : scene.primitives) {
      if (primitive_sdf(prim, p) <= scene.shell) {
        want = prim.class_id;
        break;
      }
    }
    REQUIRE(got == want);
  }
}

TEST_CASE("returns are occupied, segments in front are free") {
  SynthSpec spec = base_spec();
  spec.boxes = 3;
  spec.cylinders = 2;
  SyntheticScene scene = generate_scene(33, spec);
  Pose sensor;
  sensor.translation = {-6.0, -6.0, 1.5};
  ScanPattern pat;
  pat.azimuth_count = 128;
  pat.elevation_count = 16;
  pat.elevation_min_deg = -45;
  pat.elevation_max_deg = 10;
  SimulatedScan scan = simulate_scan(scene, sensor, pat);
  REQUIRE(scan.cloud.points.size() > 200);

  Rng rng(3);
  for (size_t i = 0; i < scan.cloud.points.size(); ++i) {
    Vec3 w = scan.cloud.points[i].position + sensor.translation;
    CHECK(ground_truth_class(scene, w) != 0);
    // a point strictly between sensor and return, clear of the shell
    Vec3 d = w - sensor.translation;
    double len = d.norm();
    if (len < 1.0) continue;
    double t = rng.uniform(0.1, 1.0 - (2.0 * scene.shell + 1e-6) / len);
    Vec3 mid = sensor.translation + d * t;
    CHECK(ground_truth_class(scene, mid, 0.0) == 0);
  }
}

TEST_CASE("scene serialization round-trips") {
  SynthSpec spec = base_spec();
  spec.boxes = 2;
  spec.cylinders = 2;
  SyntheticScene scene = generate_scene(77, spec);
  std::string dir = testutil::temp_dir("scene_io");
  save_scene(scene, dir + "/s.scn");
  SyntheticScene back = load_scene(dir + "/s.scn");
  REQUIRE(back.primitives.size() == scene.primitives.size());
  CHECK(back.seed == scene.seed);
  CHECK(back.shell == scene.shell);
  for (size_t i = 0; i < scene.primitives.size(); ++i) {
    CHECK(back.primitives[i].kind == scene.primitives[i].kind);
    CHECK(back.primitives[i].class_id == scene.primitives[i].class_id);
    CHECK(back.primitives[i].dims.x == scene.primitives[i].dims.x);
    CHECK(back.primitives[i].pose.translation.x ==
          scene.primitives[i].pose.translation.x);
  }
}
