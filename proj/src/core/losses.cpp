#include "core/losses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "core/error.hpp"
#include "core/threading.hpp"

namespace scn {

namespace detail {

// All loss kernels work on M rows of K logits laid out contiguously and add
// `scale` times the gradient into dZ (same layout, may be null).

double semantic_raw(const double* Z, size_t K, size_t M, const double* w,
                    int class_id, double scale, double* dZ, double* scratch) {
  const int c = class_id - 1;
  double* L = scratch;  // M x K log-probabilities
  for (size_t a = 0; a < M; ++a)
    stable_logsoftmax({Z + a * K, K}, {L + a * K, K});

  // log fbar_c = logsumexp_a(log w_a + L[a][c])
  double b = -std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < M; ++a)
    b = std::max(b, std::log(w[a]) + L[a * K + c]);
  double s = 0.0;
  for (size_t a = 0; a < M; ++a)
    s += std::exp(std::log(w[a]) + L[a * K + c] - b);
  double log_fbar = b + std::log(s);

  if (dZ != nullptr) {
    for (size_t a = 0; a < M; ++a) {
      double r = std::exp(std::log(w[a]) + L[a * K + c] - log_fbar);
      const double* La = L + a * K;
      double* g = dZ + a * K;
      for (size_t j = 0; j < K; ++j) g[j] += scale * r * std::exp(La[j]);
      g[c] -= scale * r;
    }
  }
  return -log_fbar;
}

double geometric_raw(const double* Z, size_t K, size_t M, const double* w,
                     bool occupied, double scale, double* dZ) {
  // Per support: z_occ = logsumexp of the semantic logits, z_free = last
  // logit; the two-class softmax of [z_occ, z_free] equals
  // [sum_i f_i, f_free].
  double terms_b = -std::numeric_limits<double>::infinity();
  thread_local std::vector<double> lse_sem_v, l_t_v;
  lse_sem_v.resize(M);
  l_t_v.resize(M);
  for (size_t a = 0; a < M; ++a) {
    const double* z = Z + a * K;
    double lse_sem = logsumexp({z, K - 1});
    double lse_all = logsumexp({z, K});
    lse_sem_v[a] = lse_sem;
    double l_t = (occupied ? lse_sem : z[K - 1]) - lse_all;
    l_t_v[a] = l_t;
    terms_b = std::max(terms_b, std::log(w[a]) + l_t);
  }
  double s = 0.0;
  for (size_t a = 0; a < M; ++a)
    s += std::exp(std::log(w[a]) + l_t_v[a] - terms_b);
  double log_qbar = terms_b + std::log(s);

  if (dZ != nullptr) {
    for (size_t a = 0; a < M; ++a) {
      const double* z = Z + a * K;
      double lse_all = logsumexp({z, K});
      double q_occ = std::exp(lse_sem_v[a] - lse_all);
      double q_free = std::exp(z[K - 1] - lse_all);
      double r = std::exp(std::log(w[a]) + l_t_v[a] - log_qbar);
      double g_occ = r * (q_occ - (occupied ? 1.0 : 0.0));
      double g_free = r * (q_free - (occupied ? 0.0 : 1.0));
      double* g = dZ + a * K;
      for (size_t j = 0; j + 1 < K; ++j)
        g[j] += scale * g_occ * std::exp(z[j] - lse_sem_v[a]);
      g[K - 1] += scale * g_free;
    }
  }
  return -log_qbar;
}

double consistency_raw(const double* Z, size_t K, size_t M, double scale,
                       double* dZ, double* scratch) {
  double* L = scratch;            // M x K log-probabilities
  double* log_pbar = L + M * K;   // K
  for (size_t a = 0; a < M; ++a)
    stable_logsoftmax({Z + a * K, K}, {L + a * K, K});

  const double log_m = std::log(static_cast<double>(M));
  for (size_t i = 0; i < K; ++i) {
    double b = -std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < M; ++a) b = std::max(b, L[a * K + i]);
    double s = 0.0;
    for (size_t a = 0; a < M; ++a) s += std::exp(L[a * K + i] - b);
    log_pbar[i] = b + std::log(s) - log_m;
  }

  double h_mix = 0.0;
  for (size_t i = 0; i < K; ++i)
    h_mix -= std::exp(log_pbar[i]) * log_pbar[i];

  double mean_h = 0.0;
  for (size_t a = 0; a < M; ++a) {
    const double* La = L + a * K;
    double h = 0.0;
    for (size_t i = 0; i < K; ++i) h -= std::exp(La[i]) * La[i];
    mean_h += h;
  }
  mean_h /= static_cast<double>(M);

  if (dZ != nullptr) {
    const double inv_m = 1.0 / static_cast<double>(M);
    for (size_t a = 0; a < M; ++a) {
      const double* La = L + a * K;
      double* g = dZ + a * K;
      double kl = 0.0;  // KL(P^a || Pbar)
      for (size_t i = 0; i < K; ++i)
        kl += std::exp(La[i]) * (La[i] - log_pbar[i]);
      for (size_t j = 0; j < K; ++j)
        g[j] += scale * inv_m * std::exp(La[j]) *
                ((La[j] - log_pbar[j]) - kl);
    }
  }
  // rounding can push the difference a hair below the JSD lower bound
  return std::max(h_mix - mean_h, 0.0);
}

}  // namespace detail

namespace {

void check_supports(const std::vector<std::vector<double>>& logits,
                    size_t min_supports) {
  if (logits.size() < min_supports)
    fail(ErrorCode::argument, "need at least " + std::to_string(min_supports) +
                                  " supports, got " +
                                  std::to_string(logits.size()));
  for (const auto& row : logits) {
    if (row.size() < 2 || row.size() != logits.front().size())
      fail(ErrorCode::argument, "support logit vectors must share length >= 2");
  }
}

void check_weights(std::span<const double> w, size_t m) {
  if (w.size() != m)
    fail(ErrorCode::argument, "weight count does not match support count");
  for (double v : w)
    if (!(v > 0.0)) fail(ErrorCode::argument, "weights must be positive");
}

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.front().size());
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

LossGrad run_with_grad(const std::vector<std::vector<double>>& support_logits,
                       const std::function<double(const double*, double*)>& f) {
  size_t m = support_logits.size();
  size_t k = support_logits.front().size();
  std::vector<double> flat = flatten(support_logits);
  std::vector<double> grad(m * k, 0.0);
  LossGrad out;
  out.value = f(flat.data(), grad.data());
  out.dlogits.resize(m);
  for (size_t a = 0; a < m; ++a)
    out.dlogits[a] =
        std::vector<double>(grad.begin() + a * k, grad.begin() + (a + 1) * k);
  return out;
}

}  // namespace

LossGrad semantic_loss(const std::vector<std::vector<double>>& support_logits,
                       std::span<const double> weights, int class_id) {
  check_supports(support_logits, 1);
  check_weights(weights, support_logits.size());
  size_t k = support_logits.front().size();
  if (class_id == static_cast<int>(k))
    fail(ErrorCode::usage, "semantic loss is not evaluated for free space");
  if (class_id < 1 || class_id >= static_cast<int>(k))
    fail(ErrorCode::argument, "class id out of range");
  size_t m = support_logits.size();
  std::vector<double> scratch(m * k);
  return run_with_grad(support_logits, [&](const double* z, double* g) {
    return detail::semantic_raw(z, k, m, weights.data(), class_id, 1.0, g,
                                scratch.data());
  });
}

LossGrad geometric_loss(const std::vector<std::vector<double>>& support_logits,
                        std::span<const double> weights, bool occupied) {
  check_supports(support_logits, 1);
  check_weights(weights, support_logits.size());
  size_t k = support_logits.front().size();
  size_t m = support_logits.size();
  return run_with_grad(support_logits, [&](const double* z, double* g) {
    return detail::geometric_raw(z, k, m, weights.data(), occupied, 1.0, g);
  });
}

LossGrad consistency_loss(
    const std::vector<std::vector<double>>& support_logits) {
  check_supports(support_logits, 2);
  size_t k = support_logits.front().size();
  size_t m = support_logits.size();
  std::vector<double> scratch(m * k + k);
  return run_with_grad(support_logits, [&](const double* z, double* g) {
    return detail::consistency_raw(z, k, m, 1.0, g, scratch.data());
  });
}

void fuse_occupied_logits(std::span<const double> logits, double* z_occ,
                          double* z_free) {
  if (logits.size() < 2)
    fail(ErrorCode::argument, "need at least two logits to fuse");
  *z_occ = logsumexp(logits.subspan(0, logits.size() - 1));
  *z_free = logits.back();
}

LossReport total_loss(const double* Z, int logit_dim,
                      std::span<const BatchTarget> targets,
                      const LossWeights& weights, double* dZ,
                      bool mean_normalize) {
  if (targets.empty()) fail(ErrorCode::argument, "empty batch");
  const size_t k = static_cast<size_t>(logit_dim);

  LossReport report;
  report.weights = weights;
  for (const BatchTarget& t : targets) {
    if (t.kind == TargetKind::semantic) {
      ++report.n_semantic;
      ++report.n_geometric;
    } else if (t.kind == TargetKind::occupied_unlabeled ||
               t.kind == TargetKind::free_space) {
      ++report.n_geometric;
    }
    if (t.support_count >= 2) ++report.n_consistency;
  }
  double s_scale = weights.lambda_s, g_scale = weights.lambda_g,
         c_scale = weights.lambda_c;
  if (mean_normalize) {
    if (report.n_semantic > 0) s_scale /= report.n_semantic;
    if (report.n_geometric > 0) g_scale /= report.n_geometric;
    if (report.n_consistency > 0) c_scale /= report.n_consistency;
  }

  size_t max_chunks =
      std::min<size_t>(thread_count(), std::max<size_t>(targets.size(), 1));
  std::vector<LossReport> partial(max_chunks);
  std::vector<const char*> bad_kind(max_chunks, nullptr);
  parallel_chunks(targets.size(), [&](size_t b, size_t e, int chunk) {
    LossReport& acc = partial[chunk];
    std::vector<double> scratch;
    for (size_t ti = b; ti < e; ++ti) {
      const BatchTarget& t = targets[ti];
      const size_t m = t.support_count;
      const double* z = Z + t.offset * k;
      double* g = dZ != nullptr ? dZ + t.offset * k : nullptr;
      scratch.resize(m * k + k);
      double v = 0.0;
      bool finite = true;
      if (t.kind == TargetKind::semantic) {
        v = detail::semantic_raw(z, k, m, t.weights, t.class_id, s_scale, g,
                                 scratch.data());
        acc.semantic += v;
        finite = finite && std::isfinite(v);
      }
      if (t.kind == TargetKind::semantic ||
          t.kind == TargetKind::occupied_unlabeled ||
          t.kind == TargetKind::free_space) {
        bool occupied = t.kind != TargetKind::free_space;
        v = detail::geometric_raw(z, k, m, t.weights, occupied, g_scale, g);
        acc.geometric += v;
        finite = finite && std::isfinite(v);
      }
      if (m >= 2) {
        v = detail::consistency_raw(z, k, m, c_scale, g, scratch.data());
        acc.consistency += v;
        finite = finite && std::isfinite(v);
      }
      if (!finite) {
        bad_kind[chunk] = target_kind_name(t.kind);
        return;
      }
    }
  });
  for (size_t c = 0; c < max_chunks; ++c) {
    if (bad_kind[c] != nullptr)
      fail(ErrorCode::numeric, std::string("non-finite loss contribution "
                                           "from target kind ") +
                                   bad_kind[c]);
    report.semantic += partial[c].semantic;
    report.geometric += partial[c].geometric;
    report.consistency += partial[c].consistency;
  }
  return report;
}

}  // namespace scn
