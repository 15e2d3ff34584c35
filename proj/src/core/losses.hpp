#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/numerics.hpp"
#include "core/target_kind.hpp"

namespace scn {

/// Constant weights of the three loss terms.
struct LossWeights {
  double lambda_s = 7.5;
  double lambda_g = 2.0;
  double lambda_c = 1.0;
};

/// Per-step loss bookkeeping. `semantic`/`geometric`/`consistency` hold the
/// plain sums over targets; total() applies the lambda weights to the sums,
/// mean_objective() to the per-kind means (the quantity the trainer descends).
struct LossReport {
  double semantic = 0.0;
  double geometric = 0.0;
  double consistency = 0.0;
  size_t n_semantic = 0;
  size_t n_geometric = 0;
  size_t n_consistency = 0;
  LossWeights weights;

  double total() const {
    return weights.lambda_s * semantic + weights.lambda_g * geometric +
           weights.lambda_c * consistency;
  }
  double mean_objective() const {
    double t = 0.0;
    if (n_semantic > 0) t += weights.lambda_s * semantic / n_semantic;
    if (n_geometric > 0) t += weights.lambda_g * geometric / n_geometric;
    if (n_consistency > 0) t += weights.lambda_c * consistency / n_consistency;
    return t;
  }
};

/// Value plus gradient with respect to every support's logits.
struct LossGrad {
  double value = 0.0;
  std::vector<std::vector<double>> dlogits;  // one row per support
};

/// Cross-entropy of the weighted-average prediction against semantic class
/// `class_id` (1-based; the free-space slot is logits.back() and its target
/// probability is zero). Computed in log space from the unscaled logits.
LossGrad semantic_loss(const std::vector<std::vector<double>>& support_logits,
                       std::span<const double> weights, int class_id);

/// Fuses the semantic logits of each support into an occupied logit via
/// log-sum-exp, then two-class cross-entropy of the weighted-average
/// occupied/free prediction against the binary occupancy label.
LossGrad geometric_loss(const std::vector<std::vector<double>>& support_logits,
                        std::span<const double> weights, bool occupied);

/// Jensen-Shannon divergence of the M per-support softmax distributions,
/// H(mean) - mean(H), computed from logits without forming probabilities
/// naively. Requires M >= 2.
LossGrad consistency_loss(
    const std::vector<std::vector<double>>& support_logits);

/// Occupied/free logit fusion: z_occ = logsumexp(z_1..z_N), z_free = z_{N+1},
/// so softmax([z_occ, z_free]) = [sum_i f_i, f_{N+1}].
void fuse_occupied_logits(std::span<const double> logits, double* z_occ,
                          double* z_free);

/// One target inside a flat logits matrix: its evaluated supports occupy rows
/// [offset, offset+support_count) and carry the given composition weights.
struct BatchTarget {
  TargetKind kind = TargetKind::consistency;
  uint16_t class_id = 0;
  uint32_t offset = 0;
  uint8_t support_count = 0;
  const double* weights = nullptr;
};

/// Routes every target to its loss terms: semantic for labeled surface
/// targets, geometric for everything with a known occupancy, consistency for
/// every target with at least two evaluated supports. Sums are unnormalized;
/// the gradient written into dZ (if non-null) is scaled per term by
/// lambda/count when mean_normalize is set, by lambda otherwise. Fails with a
/// numeric error naming the target kind if any contribution is non-finite.
LossReport total_loss(const double* Z, int logit_dim,
                      std::span<const BatchTarget> targets,
                      const LossWeights& weights, double* dZ,
                      bool mean_normalize = true);

namespace detail {
// Allocation-free kernels over M contiguous rows of K logits; they add
// `scale` times the gradient into dZ (same layout, null to skip).
// `scratch` needs M*K doubles for semantic_raw and M*K+K for consistency_raw.
double semantic_raw(const double* Z, size_t K, size_t M, const double* w,
                    int class_id, double scale, double* dZ, double* scratch);
double geometric_raw(const double* Z, size_t K, size_t M, const double* w,
                     bool occupied, double scale, double* dZ);
double consistency_raw(const double* Z, size_t K, size_t M, double scale,
                       double* dZ, double* scratch);
}  // namespace detail

}  // namespace scn
