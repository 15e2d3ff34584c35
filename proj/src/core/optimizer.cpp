#include "core/optimizer.hpp"

#include <cmath>

#include "core/error.hpp"

namespace scn {

double lr_schedule(const AdamConfig& cfg, uint64_t step) {
  double warm = cfg.warmup_steps == 0
                    ? 1.0
                    : std::min(static_cast<double>(step) /
                                   static_cast<double>(cfg.warmup_steps),
                               1.0);
  double decay =
      std::pow(cfg.decay_rate, static_cast<double>(step / cfg.decay_steps));
  return cfg.base_lr * warm * decay;
}

void adam_step(AdamState& state, const AdamConfig& cfg,
               std::span<std::span<double>> params,
               std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size())
    fail(ErrorCode::argument, "parameter/gradient block count mismatch");
  double lr = lr_schedule(cfg, state.step);
  uint64_t t = state.step + 1;
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));

  size_t off = 0;
  for (size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    if (p.size() != g.size())
      fail(ErrorCode::argument, "parameter/gradient block size mismatch");
    if (off + p.size() > state.m.size())
      fail(ErrorCode::argument, "optimizer state smaller than parameters");
    double* m = state.m.data() + off;
    double* v = state.v.data() + off;
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    off += p.size();
  }
  if (off != state.m.size())
    fail(ErrorCode::argument, "optimizer state larger than parameters");
  state.step += 1;
}

}  // namespace scn
