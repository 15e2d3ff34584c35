#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace scn {

struct AdamConfig {
  double base_lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  uint64_t warmup_steps = 2000;  // 2 * (1 - beta2)^-1
  uint64_t decay_steps = 40000;
  double decay_rate = 0.5;
};

/// lr = base * min(step/warmup, 1) * rate^floor(step/decay).
double lr_schedule(const AdamConfig& cfg, uint64_t step);

/// First/second moment accumulators over one flat parameter vector.
struct AdamState {
  std::vector<double> m, v;
  uint64_t step = 0;

  static AdamState zeros(size_t n) {
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    return s;
  }
};

/// One bias-corrected update at the scheduled learning rate for the current
/// step counter, which is then incremented. `params` and `grads` are
/// parallel block lists whose total length matches the state.
void adam_step(AdamState& state, const AdamConfig& cfg,
               std::span<std::span<double>> params,
               std::span<const std::span<const double>> grads);

}  // namespace scn
