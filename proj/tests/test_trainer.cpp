#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/threading.hpp"
#include "core/trainer.hpp"
#include "test_util.hpp"

using namespace scn;

namespace {

GridConfig tiny_grid() {
  GridConfig cfg;
  cfg.delta = 0.32;
  cfg.cells_x = 16;
  cfg.cells_y = 16;
  cfg.origin_x = 0.0;
  cfg.origin_y = 0.0;
  cfg.d1 = 6;
  cfg.d2 = 6;
  cfg.d3 = 6;
  return cfg;
}

TargetSet tiny_targets(int n_classes) {
  TargetSet ts;
  ts.extent = {{0.5, 0.5, -0.5}, {4.5, 4.5, 1.5}};
  ts.voxel_edge = 0.25;
  Rng rng(17);
  for (int i = 0; i < 120; ++i) {
    Vec3 p{rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0),
           rng.uniform(-0.4, 1.4)};
    int pick = static_cast<int>(rng.below(4));
    TargetKind kind = static_cast<TargetKind>(pick);
    uint16_t cls = kind == TargetKind::semantic
                       ? static_cast<uint16_t>(1 + rng.below(n_classes))
                       : 0;
    ts.targets.push_back(Target{p, kind, cls});
  }
  return ts;
}

TrainerConfig tiny_config(uint64_t steps) {
  TrainerConfig cfg;
  cfg.steps = steps;
  cfg.seed = 5;
  cfg.max_targets = 64;
  cfg.two_of_four = true;
  cfg.log_every = 1;
  return cfg;
}

}  // namespace

TEST_CASE("two runs with the same seed produce identical loss streams") {
  set_thread_count(1);
  ClassMap classes = ClassMap::identity(5);
  TargetSet ts = tiny_targets(5);
  TrainerConfig cfg = tiny_config(5);

  Checkpoint a = init_checkpoint(tiny_grid(), classes, cfg);
  Checkpoint b = init_checkpoint(tiny_grid(), classes, cfg);
  for (int s = 0; s < 5; ++s) {
    LossReport ra = train_step(a, ts, cfg);
    LossReport rb = train_step(b, ts, cfg);
    CHECK(ra.total() == rb.total());
    CHECK(ra.semantic == rb.semantic);
    CHECK(ra.consistency == rb.consistency);
  }
  set_thread_count(0);
}

TEST_CASE("train_step advances the counter and moves parameters") {
  set_thread_count(1);
  ClassMap classes = ClassMap::identity(5);
  TargetSet ts = tiny_targets(5);
  TrainerConfig cfg = tiny_config(3);
  Checkpoint ckpt = init_checkpoint(tiny_grid(), classes, cfg);
  double before = ckpt.grid.level3[0];
  LossReport r = train_step(ckpt, ts, cfg);
  CHECK(ckpt.opt.step == 1);
  CHECK(std::isfinite(r.total()));
  // step 0 runs at lr 0 (warmup start): parameters must be unchanged
  CHECK(ckpt.grid.level3[0] == before);
  train_step(ckpt, ts, cfg);
  CHECK(ckpt.opt.step == 2);
  set_thread_count(0);
}

TEST_CASE("checkpoint save/load round-trips bit for bit") {
  set_thread_count(1);
  std::string dir = testutil::temp_dir("ckpt");
  ClassMap classes = ClassMap::identity(4);
  TargetSet ts = tiny_targets(4);
  TrainerConfig cfg = tiny_config(4);
  Checkpoint ckpt = init_checkpoint(tiny_grid(), classes, cfg);
  for (int s = 0; s < 3; ++s) train_step(ckpt, ts, cfg);

  save_checkpoint(ckpt, dir + "/a.ckpt");
  Checkpoint back = load_checkpoint(dir + "/a.ckpt");
  save_checkpoint(back, dir + "/b.ckpt");
  CHECK(testutil::read_file(dir + "/a.ckpt") ==
        testutil::read_file(dir + "/b.ckpt"));

  // save -> load -> one step equals uninterrupted one step, bit for bit
  LossReport r1 = train_step(ckpt, ts, cfg);
  LossReport r2 = train_step(back, ts, cfg);
  CHECK(r1.total() == r2.total());
  save_checkpoint(ckpt, dir + "/c.ckpt");
  save_checkpoint(back, dir + "/d.ckpt");
  CHECK(testutil::read_file(dir + "/c.ckpt") ==
        testutil::read_file(dir + "/d.ckpt"));
  set_thread_count(0);
}

TEST_CASE("fit with zero steps checkpoints the initial state and resumes") {
  set_thread_count(1);
  std::string dir = testutil::temp_dir("fit0");
  ClassMap classes = ClassMap::identity(4);
  TargetSet ts = tiny_targets(4);
  TrainerConfig cfg = tiny_config(0);

  Checkpoint initial =
      fit(ts, tiny_grid(), classes, cfg, dir + "/c.ckpt", "", "manifest v0");
  CHECK(initial.opt.step == 0);
  Checkpoint loaded = load_checkpoint(dir + "/c.ckpt");
  CHECK(loaded.manifest == "manifest v0");

  // resumed run continues the identical stream
  TrainerConfig cfg4 = tiny_config(4);
  Checkpoint full =
      fit(ts, tiny_grid(), classes, cfg4, dir + "/full.ckpt", "", "m");
  TrainerConfig cfg2 = tiny_config(2);
  fit(ts, tiny_grid(), classes, cfg2, dir + "/half.ckpt", "", "m");
  Checkpoint resumed = fit(ts, tiny_grid(), classes, cfg4, dir + "/res.ckpt",
                           "", "m", dir + "/half.ckpt");
  save_checkpoint(full, dir + "/full2.ckpt");
  save_checkpoint(resumed, dir + "/res2.ckpt");
  CHECK(testutil::read_file(dir + "/full2.ckpt") ==
        testutil::read_file(dir + "/res2.ckpt"));

  CHECK_THROWS_AS(fit(TargetSet{}, tiny_grid(), classes, cfg, "", "", ""),
                  Error);
  set_thread_count(0);
}
