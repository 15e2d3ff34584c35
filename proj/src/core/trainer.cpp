#include "core/trainer.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "core/error.hpp"

namespace scn {

size_t Checkpoint::total_params() const {
  size_t n = 0;
  for (auto b : params.param_blocks()) n += b.size();
  return n + grid.level1.size() + grid.level2.size() + grid.level3.size();
}

Checkpoint init_checkpoint(const GridConfig& grid_cfg, const ClassMap& classes,
                           const TrainerConfig& cfg) {
  Checkpoint ckpt;
  Rng dec_rng = Rng::stream(cfg.seed, "init.decoder");
  ckpt.params = DecoderParams::init(classes.n_classes, grid_cfg.d1,
                                    grid_cfg.d2, grid_cfg.d3, dec_rng);
  ckpt.grid = LatentGrid::zeros(grid_cfg);
  Rng lat_rng = Rng::stream(cfg.seed, "init.latent");
  for (auto* level : {&ckpt.grid.level1, &ckpt.grid.level2, &ckpt.grid.level3})
    for (double& v : *level) v = lat_rng.normal(0.0, cfg.latent_init_std);
  ckpt.opt = AdamState::zeros(ckpt.total_params());
  ckpt.class_map = classes;
  ckpt.seed = cfg.seed;
  return ckpt;
}

namespace {

std::vector<std::span<double>> all_param_blocks(Checkpoint& ckpt) {
  auto blocks = ckpt.params.param_blocks();
  blocks.emplace_back(ckpt.grid.level1);
  blocks.emplace_back(ckpt.grid.level2);
  blocks.emplace_back(ckpt.grid.level3);
  return blocks;
}

std::vector<std::span<const double>> all_grad_blocks(
    const DecoderParams& pg, const LatentGrid& gg) {
  auto blocks = pg.param_blocks();
  blocks.emplace_back(gg.level1);
  blocks.emplace_back(gg.level2);
  blocks.emplace_back(gg.level3);
  return blocks;
}

}  // namespace

LossReport train_step(Checkpoint& ckpt, const TargetSet& targets,
                      const TrainerConfig& cfg) {
  Rng batch_rng = Rng::stream(ckpt.seed, "train.batch", ckpt.opt.step);
  TrainingBatch batch =
      build_batch(targets, cfg.max_targets, cfg.two_of_four, batch_rng);

  // Expand targets into per-support decoder evaluations.
  size_t n_targets = batch.entries.size();
  std::vector<SupportEval> evals;
  std::vector<double> weights;
  std::vector<BatchTarget> bts(n_targets);
  evals.reserve(n_targets * (cfg.two_of_four ? 2 : 4));
  weights.reserve(evals.capacity());
  for (size_t i = 0; i < n_targets; ++i) {
    const TrainingBatch::Entry& e = batch.entries[i];
    const Target& t = targets.targets[e.target_index];
    SupportRegion region = support_region(t.position, ckpt.grid.config);
    auto entries = gather(ckpt.grid, region);
    BatchTarget& bt = bts[i];
    bt.kind = t.kind;
    bt.class_id = t.class_id;
    bt.offset = static_cast<uint32_t>(evals.size());
    if (e.support_a != 255) {
      for (uint8_t s : {e.support_a, e.support_b}) {
        evals.push_back(to_eval(entries[s]));
        weights.push_back(entries[s].weight * 2.0);  // unbiased 2-of-4
      }
      bt.support_count = 2;
    } else {
      for (int s = 0; s < 4; ++s) {
        evals.push_back(to_eval(entries[s]));
        weights.push_back(entries[s].weight);
      }
      bt.support_count = 4;
    }
  }
  // weights vector is stable now; wire the pointers
  for (size_t i = 0; i < n_targets; ++i)
    bts[i].weights = weights.data() + bts[i].offset;

  ForwardCache cache;
  std::vector<double> logits =
      forward_batch(ckpt.params, evals, RunMode::train, &cache);

  const int k = ckpt.params.logit_dim();
  std::vector<double> dz(logits.size(), 0.0);
  LossReport report = total_loss(logits.data(), k, bts, cfg.loss_weights,
                                 dz.data(), cfg.mean_normalize);
  if (!std::isfinite(report.total()))
    fail(ErrorCode::numeric, "non-finite total loss");

  BackwardResult bw = backward_batch(ckpt.params, cache, dz);
  LatentGrid grid_grads = LatentGrid::zeros(ckpt.grid.config);
  bw.scatter_latent_grads(grid_grads);

  auto params = all_param_blocks(ckpt);
  auto grads = all_grad_blocks(bw.param_grads, grid_grads);
  adam_step(ckpt.opt, cfg.adam, params, grads);
  update_running_stats(ckpt.params, cache);
  return report;
}

std::string format_metrics_line(uint64_t step, double lr,
                                const LossReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "step=%" PRIu64
                " lr=%.12g total=%.12g semantic=%.12g geometric=%.12g "
                "consistency=%.12g objective=%.12g n_sem=%zu n_geo=%zu "
                "n_con=%zu",
                step, lr, r.total(), r.semantic, r.geometric, r.consistency,
                r.mean_objective(), r.n_semantic, r.n_geometric,
                r.n_consistency);
  return std::string(buf);
}

Checkpoint fit(const TargetSet& targets, const GridConfig& grid_cfg,
               const ClassMap& classes, const TrainerConfig& cfg,
               const std::string& ckpt_path, const std::string& metrics_path,
               const std::string& manifest,
               const std::optional<std::string>& resume_from) {
  if (targets.targets.empty())
    fail(ErrorCode::argument, "cannot fit an empty target set");

  Checkpoint ckpt;
  bool resumed = false;
  if (resume_from.has_value()) {
    ckpt = load_checkpoint(*resume_from);
    if (!(ckpt.grid.config == grid_cfg))
      fail(ErrorCode::argument, "resume checkpoint grid config mismatch");
    resumed = true;
  } else {
    ckpt = init_checkpoint(grid_cfg, classes, cfg);
  }
  ckpt.manifest = manifest;

  std::ofstream metrics;
  if (!metrics_path.empty()) {
    metrics.open(metrics_path, resumed ? std::ios::app : std::ios::trunc);
    if (!metrics) fail(ErrorCode::io, "cannot open " + metrics_path);
  }

  while (ckpt.opt.step < cfg.steps) {
    uint64_t step = ckpt.opt.step;
    double lr = lr_schedule(cfg.adam, step);
    LossReport report = train_step(ckpt, targets, cfg);
    if (metrics.is_open() &&
        (step % std::max<uint64_t>(cfg.log_every, 1) == 0 ||
         step + 1 == cfg.steps))
      metrics << format_metrics_line(step, lr, report) << "\n";
    if (cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0 &&
        !ckpt_path.empty())
      save_checkpoint(ckpt, ckpt_path);
  }
  if (metrics.is_open()) metrics.flush();
  if (!ckpt_path.empty()) save_checkpoint(ckpt, ckpt_path);
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  Container c;
  c.add_string("kind", "checkpoint");
  c.add_scalar_u64("seed", ckpt.seed);
  grid_config_to_container(ckpt.grid.config, c, "grid.");
  class_map_to_container(ckpt.class_map, c, "classes.");
  decoder_params_to_container(ckpt.params, c, "dec.");
  c.add_f64("lat.level1", ckpt.grid.level1);
  c.add_f64("lat.level2", ckpt.grid.level2);
  c.add_f64("lat.level3", ckpt.grid.level3);
  c.add_f64("opt.m", ckpt.opt.m);
  c.add_f64("opt.v", ckpt.opt.v);
  c.add_scalar_u64("opt.step", ckpt.opt.step);
  c.add_string("manifest", ckpt.manifest);
  c.save(path);
}

Checkpoint load_checkpoint(const std::string& path) {
  Container c = Container::load(path);
  if (c.get_string("kind") != "checkpoint")
    fail(ErrorCode::format, path + ": not a checkpoint file");
  Checkpoint ckpt;
  ckpt.seed = c.get_scalar_u64("seed");
  GridConfig grid_cfg = grid_config_from_container(c, "grid.");
  ckpt.class_map = class_map_from_container(c, "classes.");
  ckpt.params = decoder_params_from_container(c, "dec.");
  ckpt.grid = LatentGrid::zeros(grid_cfg);
  auto fill = [&](const std::string& name, std::vector<double>& dst) {
    auto v = c.get_f64(name);
    if (v.size() != dst.size())
      fail(ErrorCode::format, path + ": latent level size mismatch");
    dst = std::move(v);
  };
  fill("lat.level1", ckpt.grid.level1);
  fill("lat.level2", ckpt.grid.level2);
  fill("lat.level3", ckpt.grid.level3);
  ckpt.opt.m = c.get_f64("opt.m");
  ckpt.opt.v = c.get_f64("opt.v");
  ckpt.opt.step = c.get_scalar_u64("opt.step");
  ckpt.manifest = c.get_string("manifest");
  if (ckpt.opt.m.size() != ckpt.total_params() ||
      ckpt.opt.v.size() != ckpt.total_params())
    fail(ErrorCode::format, path + ": optimizer state size mismatch");
  if (!ckpt.grid.all_finite())
    fail(ErrorCode::data, path + ": non-finite latent entries");
  return ckpt;
}

}  // namespace scn
