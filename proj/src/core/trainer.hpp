#pragma once

#include <optional>
#include <string>

#include "core/class_map.hpp"
#include "core/decoder.hpp"
#include "core/latent_grid.hpp"
#include "core/losses.hpp"
#include "core/optimizer.hpp"
#include "core/sampling.hpp"
#include "core/targets.hpp"

namespace scn {

struct TrainerConfig {
  uint64_t steps = 20000;
  uint64_t seed = 1;
  size_t max_targets = 50000;
  bool two_of_four = true;
  LossWeights loss_weights;
  AdamConfig adam;
  uint64_t log_every = 100;
  uint64_t checkpoint_every = 0;  // 0 = final only
  double latent_init_std = 0.01;
  bool mean_normalize = true;
};

/// Complete optimization state: decoder weights and latent grids are free
/// parameters sharing one optimizer.
struct Checkpoint {
  DecoderParams params;
  LatentGrid grid;
  AdamState opt;
  ClassMap class_map;
  uint64_t seed = 0;
  std::string manifest;

  size_t total_params() const;
};

Checkpoint init_checkpoint(const GridConfig& grid_cfg, const ClassMap& classes,
                           const TrainerConfig& cfg);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// One optimization step: per-step uniform batch subsample (stateless in the
/// step counter, so a resumed run replays the identical batch stream),
/// forward in train mode, loss gradients, one Adam update, running-stat fold.
LossReport train_step(Checkpoint& ckpt, const TargetSet& targets,
                      const TrainerConfig& cfg);

/// Runs the configured number of steps, appending one metrics line every
/// log_every steps to `metrics_path` (empty = no log) and checkpointing to
/// `ckpt_path` every checkpoint_every steps plus at the end.
Checkpoint fit(const TargetSet& targets, const GridConfig& grid_cfg,
               const ClassMap& classes, const TrainerConfig& cfg,
               const std::string& ckpt_path, const std::string& metrics_path,
               const std::string& manifest,
               const std::optional<std::string>& resume_from = std::nullopt);

std::string format_metrics_line(uint64_t step, double lr,
                                const LossReport& report);

}  // namespace scn
