#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/latent_grid.hpp"
#include "core/rng.hpp"

namespace scn {

struct Dense {
  int out = 0, in = 0;
  std::vector<double> w;  // row-major [out][in]
  std::vector<double> b;  // [out]

  static Dense zeros(int out, int in) {
    Dense d;
    d.out = out;
    d.in = in;
    d.w.assign(static_cast<size_t>(out) * in, 0.0);
    d.b.assign(out, 0.0);
    return d;
  }
};

struct BatchNormStats {
  std::vector<double> mean, var;  // running statistics, per feature
};

/// Weights of the conditioned MLP. The trunk maps the level-1 relative
/// coordinate through three normalization+conditioning blocks (conditioned on
/// progressively finer latent concatenations, with the level-2/3 relative
/// coordinates concatenated in between), two plain hidden layers and a final
/// projection to n_classes+1 logits; the last logit is free space.
struct DecoderParams {
  static constexpr int kWidth = 32;

  int n_classes = 19;
  int d1 = 256, d2 = 256, d3 = 128;
  // Conditioning projections emit 2*kWidth units: first half scale, second
  // half shift.
  Dense proj1;  // d1           -> 2W
  Dense proj2;  // d1+d2        -> 2W
  Dense proj3;  // d1+d2+d3     -> 2W
  Dense fc_in;    // 3   -> W
  Dense fc_mid2;  // W+3 -> W
  Dense fc_mid3;  // W+3 -> W
  Dense fc_h1;    // W -> W
  Dense fc_h2;    // W -> W
  Dense fc_out;   // W -> n_classes+1
  BatchNormStats bn1, bn2, bn3;
  double bn_momentum = 0.99;
  double bn_eps = 1e-5;

  int logit_dim() const { return n_classes + 1; }

  /// Hidden layers get fan-in scaled uniform weights; projections start as
  /// identity conditioning (scale 1, shift 0); the output layer is zero with
  /// a +2 bias on the free-space logit.
  static DecoderParams init(int n_classes, int d1, int d2, int d3, Rng& rng);

  DecoderParams zeros_like() const;
  bool all_finite() const;

  /// Optimizable parameter blocks in a fixed order (running stats excluded).
  std::vector<std::span<double>> param_blocks();
  std::vector<std::span<const double>> param_blocks() const;
  std::vector<std::string> param_block_names() const;
};

enum class RunMode { train, infer };

constexpr uint64_t kNoKey = std::numeric_limits<uint64_t>::max();

/// One decoder evaluation: conditioning vectors plus relative coordinates of
/// a single (query, support) pair. Keys identify the source grid cells so
/// projections can be shared between evaluations and gradients scattered
/// back; pass kNoKey for free-standing inputs.
struct SupportEval {
  const double* c1 = nullptr;
  const double* c2 = nullptr;
  const double* c3 = nullptr;
  Vec3 p1, p2, p3;
  uint64_t key1 = kNoKey, key2 = kNoKey, key3 = kNoKey;
};

inline SupportEval to_eval(const GatherEntry& g) {
  return SupportEval{g.c1, g.c2, g.c3, g.p1, g.p2, g.p3,
                     g.key1, g.key2, g.key3};
}

namespace decoder_detail {
struct ProjTable {
  int in_dim = 0;
  std::vector<std::array<uint64_t, 3>> keys;         // per unique entry
  std::vector<std::array<const double*, 3>> srcs;    // per unique entry
  std::vector<int> src_dims;                         // segment widths
  std::vector<double> out;                           // unique x 2W
  std::vector<uint32_t> of;                          // eval -> unique
};
struct BNCache {
  std::vector<double> mean, inv_std;  // per feature, as used in the pass
  std::vector<double> batch_mean, batch_var;  // train mode only
  std::vector<double> xhat;                   // n x W
};
}  // namespace decoder_detail

struct ForwardCache {
  RunMode mode = RunMode::infer;
  size_t n = 0;
  int k = 0;
  bool consumed = false;
  std::vector<SupportEval> evals;
  decoder_detail::ProjTable t1, t2, t3;
  decoder_detail::BNCache bn1, bn2, bn3;
  std::vector<double> r1, r2, r3, h4, h5;  // n x W post-activation
};

/// Batched forward pass. In train mode normalization uses batch statistics
/// over all evaluations (they form one logical step); in infer mode it uses
/// the stored running statistics and the result is a pure function of
/// (params, inputs). Returns row-major n x logit_dim logits. `cache` is
/// required for backward().
std::vector<double> forward_batch(const DecoderParams& params,
                                  std::span<const SupportEval> evals,
                                  RunMode mode, ForwardCache* cache);

/// Gradients of one forward pass.
struct BackwardResult {
  DecoderParams param_grads;  // same shapes, running stats unused
  // d loss / d conditioning, per unique projection entry (concatenated
  // segments in level order). Scatter with the stored keys.
  std::vector<double> dproj1_in, dproj2_in, dproj3_in;
  std::vector<std::array<uint64_t, 3>> proj1_keys, proj2_keys, proj3_keys;
  std::vector<double> dcoords;  // n x 9: dp1, dp2, dp3

  /// Adds the conditioning gradients into a gradient accumulator shaped like
  /// the latent grid. Requires real cell keys.
  void scatter_latent_grads(LatentGrid& grad_grid) const;
};

/// Exact reverse-mode gradients of forward_batch with respect to parameters,
/// conditioning vectors and relative coordinates. `upstream` is d loss /
/// d logits, row-major n x logit_dim. A cache can be consumed once.
BackwardResult backward_batch(const DecoderParams& params, ForwardCache& cache,
                              std::span<const double> upstream);

/// Folds the batch statistics recorded by a train-mode forward into the
/// running statistics: running = momentum * running + (1-momentum) * batch.
void update_running_stats(DecoderParams& params, const ForwardCache& cache);

/// Composed prediction at p: per-support softmax blended with the bilinear
/// weights; sums to 1. Throws a domain error outside the grid footprint.
std::vector<double> predict(const DecoderParams& params, const LatentGrid& grid,
                            const Vec3& p);

/// Free-space probability and its spatial gradient at p, including the
/// bilinear-weight term. Used by mesh refinement.
struct FreeSpaceGrad {
  double value = 0.0;
  Vec3 grad;
};
FreeSpaceGrad free_space_with_grad(const DecoderParams& params,
                                   const LatentGrid& grid, const Vec3& p);

void decoder_params_to_container(const DecoderParams& p, Container& c,
                                 const std::string& prefix);
DecoderParams decoder_params_from_container(const Container& c,
                                            const std::string& prefix);

}  // namespace scn
