#include "core/decoder.hpp"

#include <cmath>
#include <cstring>
#include <unordered_map>

#include "core/error.hpp"
#include "core/numerics.hpp"
#include "core/threading.hpp"

namespace scn {

using decoder_detail::BNCache;
using decoder_detail::ProjTable;

namespace {

constexpr int W = DecoderParams::kWidth;

void check_finite(std::span<const double> v, const char* layer) {
  for (double x : v)
    if (!std::isfinite(x))
      fail(ErrorCode::numeric,
           std::string("non-finite activation after layer ") + layer);
}

struct Key3 {
  uint64_t a, b, c;
  bool operator==(const Key3&) const = default;
};
struct Key3Hash {
  size_t operator()(const Key3& k) const {
    uint64_t h = k.a * 0x9e3779b97f4a7c15ull;
    h ^= k.b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= k.c + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return static_cast<size_t>(h);
  }
};

// Deduplicates conditioning inputs by cell key and evaluates the projection
// once per unique entry.
ProjTable build_proj_table(const Dense& proj,
                           std::span<const SupportEval> evals, int levels,
                           std::vector<int> src_dims) {
  ProjTable t;
  t.in_dim = proj.in;
  t.src_dims = std::move(src_dims);
  t.of.resize(evals.size());
  std::unordered_map<Key3, uint32_t, Key3Hash> index;
  index.reserve(evals.size());
  for (size_t e = 0; e < evals.size(); ++e) {
    const SupportEval& ev = evals[e];
    Key3 key{ev.key1, levels > 1 ? ev.key2 : 0, levels > 2 ? ev.key3 : 0};
    bool anon = ev.key1 == kNoKey ||
                (levels > 1 && ev.key2 == kNoKey) ||
                (levels > 2 && ev.key3 == kNoKey);
    if (anon) key = Key3{kNoKey, e, static_cast<uint64_t>(levels)};
    auto [it, inserted] =
        index.try_emplace(key, static_cast<uint32_t>(t.keys.size()));
    if (inserted) {
      t.keys.push_back({ev.key1, ev.key2, ev.key3});
      t.srcs.push_back({ev.c1, ev.c2, ev.c3});
    }
    t.of[e] = it->second;
  }
  size_t u = t.keys.size();
  t.out.assign(u * proj.out, 0.0);
  parallel_chunks(u, [&](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i) {
      double* y = t.out.data() + i * proj.out;
      for (int o = 0; o < proj.out; ++o) {
        const double* wr = proj.w.data() + static_cast<size_t>(o) * proj.in;
        double s = proj.b[o];
        int col = 0;
        for (int seg = 0; seg < levels; ++seg) {
          const double* src = t.srcs[i][seg];
          int dim = t.src_dims[seg];
          for (int k = 0; k < dim; ++k) s += wr[col + k] * src[k];
          col += dim;
        }
        y[o] = s;
      }
    }
  });
  return t;
}

// Y[n x d.out] = X W^T + b with X rows produced by `get`.
template <class GetRow>
void dense_forward(const Dense& d, size_t n, const GetRow& get, double* Y) {
  parallel_chunks(n, [&](size_t b, size_t e, int) {
    std::vector<double> x(d.in);
    for (size_t i = b; i < e; ++i) {
      get(i, x.data());
      double* y = Y + i * d.out;
      for (int o = 0; o < d.out; ++o) {
        const double* wr = d.w.data() + static_cast<size_t>(o) * d.in;
        double s = d.b[o];
        for (int k = 0; k < d.in; ++k) s += wr[k] * x[k];
        y[o] = s;
      }
    }
  });
}

// Accumulates dW, db and optionally dX for Y = X W^T + b. Chunk-local
// buffers merged in chunk order keep the reduction deterministic.
template <class GetRow>
void dense_backward(const Dense& d, size_t n, const GetRow& get,
                    const double* dY, Dense& grad, double* dX) {
  size_t max_chunks = std::min<size_t>(thread_count(), std::max<size_t>(n, 1));
  std::vector<std::vector<double>> dws(max_chunks), dbs(max_chunks);
  parallel_chunks(n, [&](size_t b, size_t e, int chunk) {
    auto& dw = dws[chunk];
    auto& db = dbs[chunk];
    dw.assign(d.w.size(), 0.0);
    db.assign(d.b.size(), 0.0);
    std::vector<double> x(d.in);
    for (size_t i = b; i < e; ++i) {
      get(i, x.data());
      const double* g = dY + i * d.out;
      for (int o = 0; o < d.out; ++o) {
        double go = g[o];
        if (go != 0.0) {
          double* dwr = dw.data() + static_cast<size_t>(o) * d.in;
          for (int k = 0; k < d.in; ++k) dwr[k] += go * x[k];
        }
        db[o] += go;
      }
      if (dX != nullptr) {
        double* gx = dX + i * d.in;
        for (int k = 0; k < d.in; ++k) {
          double s = 0.0;
          for (int o = 0; o < d.out; ++o)
            s += g[o] * d.w[static_cast<size_t>(o) * d.in + k];
          gx[k] = s;
        }
      }
    }
  });
  for (size_t c = 0; c < max_chunks; ++c) {
    if (dws[c].empty()) continue;
    for (size_t i = 0; i < grad.w.size(); ++i) grad.w[i] += dws[c][i];
    for (size_t i = 0; i < grad.b.size(); ++i) grad.b[i] += dbs[c][i];
  }
}

// Normalization without learnable affine; conditioning supplies scale/shift.
void bn_forward(const BatchNormStats& running, double eps, RunMode mode,
                size_t n, const double* H, BNCache& cache) {
  cache.mean.assign(W, 0.0);
  cache.inv_std.assign(W, 0.0);
  cache.xhat.assign(n * W, 0.0);
  if (mode == RunMode::train) {
    size_t max_chunks =
        std::min<size_t>(thread_count(), std::max<size_t>(n, 1));
    std::vector<std::vector<double>> sums(max_chunks);
    parallel_chunks(n, [&](size_t b, size_t e, int chunk) {
      auto& s = sums[chunk];
      s.assign(W, 0.0);
      for (size_t i = b; i < e; ++i)
        for (int j = 0; j < W; ++j) s[j] += H[i * W + j];
    });
    for (auto& s : sums)
      if (!s.empty())
        for (int j = 0; j < W; ++j) cache.mean[j] += s[j];
    for (int j = 0; j < W; ++j) cache.mean[j] /= static_cast<double>(n);

    std::vector<std::vector<double>> sq(max_chunks);
    parallel_chunks(n, [&](size_t b, size_t e, int chunk) {
      auto& s = sq[chunk];
      s.assign(W, 0.0);
      for (size_t i = b; i < e; ++i)
        for (int j = 0; j < W; ++j) {
          double d = H[i * W + j] - cache.mean[j];
          s[j] += d * d;
        }
    });
    std::vector<double> var(W, 0.0);
    for (auto& s : sq)
      if (!s.empty())
        for (int j = 0; j < W; ++j) var[j] += s[j];
    for (int j = 0; j < W; ++j) var[j] /= static_cast<double>(n);
    cache.batch_mean = cache.mean;
    cache.batch_var = var;
    for (int j = 0; j < W; ++j)
      cache.inv_std[j] = 1.0 / std::sqrt(var[j] + eps);
  } else {
    cache.mean = running.mean;
    for (int j = 0; j < W; ++j)
      cache.inv_std[j] = 1.0 / std::sqrt(running.var[j] + eps);
  }
  parallel_chunks(n, [&](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i)
      for (int j = 0; j < W; ++j)
        cache.xhat[i * W + j] =
            (H[i * W + j] - cache.mean[j]) * cache.inv_std[j];
  });
}

// Exact gradient through batch statistics in train mode.
void bn_backward(const BNCache& cache, RunMode mode, size_t n,
                 const double* dxhat, double* dH) {
  if (mode == RunMode::infer) {
    parallel_chunks(n, [&](size_t b, size_t e, int) {
      for (size_t i = b; i < e; ++i)
        for (int j = 0; j < W; ++j)
          dH[i * W + j] = dxhat[i * W + j] * cache.inv_std[j];
    });
    return;
  }
  size_t max_chunks = std::min<size_t>(thread_count(), std::max<size_t>(n, 1));
  std::vector<std::vector<double>> m1s(max_chunks), m2s(max_chunks);
  parallel_chunks(n, [&](size_t b, size_t e, int chunk) {
    auto& m1 = m1s[chunk];
    auto& m2 = m2s[chunk];
    m1.assign(W, 0.0);
    m2.assign(W, 0.0);
    for (size_t i = b; i < e; ++i)
      for (int j = 0; j < W; ++j) {
        m1[j] += dxhat[i * W + j];
        m2[j] += dxhat[i * W + j] * cache.xhat[i * W + j];
      }
  });
  std::vector<double> m1(W, 0.0), m2(W, 0.0);
  for (size_t c = 0; c < max_chunks; ++c) {
    if (m1s[c].empty()) continue;
    for (int j = 0; j < W; ++j) {
      m1[j] += m1s[c][j];
      m2[j] += m2s[c][j];
    }
  }
  double inv_n = 1.0 / static_cast<double>(n);
  for (int j = 0; j < W; ++j) {
    m1[j] *= inv_n;
    m2[j] *= inv_n;
  }
  parallel_chunks(n, [&](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i)
      for (int j = 0; j < W; ++j)
        dH[i * W + j] = cache.inv_std[j] * (dxhat[i * W + j] - m1[j] -
                                            cache.xhat[i * W + j] * m2[j]);
  });
}

// y = scale * xhat + shift, then relu; per-eval scale/shift from the proj
// table. Writes the post-relu activation.
void condition_relu(const ProjTable& t, size_t n, const BNCache& bn,
                    std::vector<double>& r, const char* layer) {
  r.assign(n * W, 0.0);
  parallel_chunks(n, [&](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i) {
      const double* proj = t.out.data() + static_cast<size_t>(t.of[i]) * 2 * W;
      for (int j = 0; j < W; ++j) {
        double y = proj[j] * bn.xhat[i * W + j] + proj[W + j];
        r[i * W + j] = y > 0.0 ? y : 0.0;
      }
    }
  });
  check_finite(r, layer);
}

// Reverse of condition_relu: consumes d(post-relu), emits d(xhat) and
// accumulates d(scale/shift) per unique projection entry.
void condition_relu_backward(const ProjTable& t, size_t n, const BNCache& bn,
                             const std::vector<double>& r, const double* dr,
                             std::vector<double>& dproj_out, double* dxhat) {
  dproj_out.assign(t.keys.size() * 2 * W, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double* proj = t.out.data() + static_cast<size_t>(t.of[i]) * 2 * W;
    double* dp = dproj_out.data() + static_cast<size_t>(t.of[i]) * 2 * W;
    for (int j = 0; j < W; ++j) {
      double dy = r[i * W + j] > 0.0 ? dr[i * W + j] : 0.0;
      dp[j] += dy * bn.xhat[i * W + j];
      dp[W + j] += dy;
      dxhat[i * W + j] = dy * proj[j];
    }
  }
}

// Backward through one projection: accumulates dW/db, writes per-unique
// input gradients.
void proj_backward(const Dense& proj, const ProjTable& t,
                   const std::vector<double>& dproj_out, Dense& grad,
                   std::vector<double>& dproj_in) {
  size_t u = t.keys.size();
  dproj_in.assign(u * proj.in, 0.0);
  size_t max_chunks = std::min<size_t>(thread_count(), std::max<size_t>(u, 1));
  std::vector<std::vector<double>> dws(max_chunks), dbs(max_chunks);
  parallel_chunks(u, [&](size_t b, size_t e, int chunk) {
    auto& dw = dws[chunk];
    auto& db = dbs[chunk];
    dw.assign(proj.w.size(), 0.0);
    db.assign(proj.b.size(), 0.0);
    std::vector<double> x(proj.in);
    for (size_t i = b; i < e; ++i) {
      int col = 0;
      for (size_t seg = 0; seg < t.src_dims.size(); ++seg) {
        std::memcpy(x.data() + col, t.srcs[i][seg],
                    sizeof(double) * t.src_dims[seg]);
        col += t.src_dims[seg];
      }
      const double* g = dproj_out.data() + i * proj.out;
      double* gx = dproj_in.data() + i * proj.in;
      for (int o = 0; o < proj.out; ++o) {
        double go = g[o];
        db[o] += go;
        const double* wr = proj.w.data() + static_cast<size_t>(o) * proj.in;
        double* dwr = dw.data() + static_cast<size_t>(o) * proj.in;
        if (go != 0.0)
          for (int k = 0; k < proj.in; ++k) {
            dwr[k] += go * x[k];
            gx[k] += go * wr[k];
          }
      }
    }
  });
  for (size_t c = 0; c < max_chunks; ++c) {
    if (dws[c].empty()) continue;
    for (size_t i = 0; i < grad.w.size(); ++i) grad.w[i] += dws[c][i];
    for (size_t i = 0; i < grad.b.size(); ++i) grad.b[i] += dbs[c][i];
  }
}

void relu_backward_inplace(const std::vector<double>& act, double* d,
                           size_t count) {
  for (size_t i = 0; i < count; ++i)
    if (act[i] <= 0.0) d[i] = 0.0;
}

}  // namespace

DecoderParams DecoderParams::init(int n_classes, int d1, int d2, int d3,
                                  Rng& rng) {
  if (n_classes < 1) fail(ErrorCode::argument, "need at least one class");
  DecoderParams p;
  p.n_classes = n_classes;
  p.d1 = d1;
  p.d2 = d2;
  p.d3 = d3;
  p.proj1 = Dense::zeros(2 * W, d1);
  p.proj2 = Dense::zeros(2 * W, d1 + d2);
  p.proj3 = Dense::zeros(2 * W, d1 + d2 + d3);
  for (Dense* proj : {&p.proj1, &p.proj2, &p.proj3})
    for (int j = 0; j < W; ++j) proj->b[j] = 1.0;  // identity conditioning

  auto he_uniform = [&rng](Dense& d) {
    double lim = std::sqrt(6.0 / d.in);
    for (double& x : d.w) x = rng.uniform(-lim, lim);
  };
  p.fc_in = Dense::zeros(W, 3);
  p.fc_mid2 = Dense::zeros(W, W + 3);
  p.fc_mid3 = Dense::zeros(W, W + 3);
  p.fc_h1 = Dense::zeros(W, W);
  p.fc_h2 = Dense::zeros(W, W);
  he_uniform(p.fc_in);
  he_uniform(p.fc_mid2);
  he_uniform(p.fc_mid3);
  he_uniform(p.fc_h1);
  he_uniform(p.fc_h2);

  p.fc_out = Dense::zeros(p.logit_dim(), W);
  p.fc_out.b[p.n_classes] = 2.0;  // start leaning toward free space

  p.bn1.mean.assign(W, 0.0);
  p.bn1.var.assign(W, 1.0);
  p.bn2 = p.bn1;
  p.bn3 = p.bn1;
  return p;
}

DecoderParams DecoderParams::zeros_like() const {
  DecoderParams g;
  g.n_classes = n_classes;
  g.d1 = d1;
  g.d2 = d2;
  g.d3 = d3;
  g.proj1 = Dense::zeros(proj1.out, proj1.in);
  g.proj2 = Dense::zeros(proj2.out, proj2.in);
  g.proj3 = Dense::zeros(proj3.out, proj3.in);
  g.fc_in = Dense::zeros(fc_in.out, fc_in.in);
  g.fc_mid2 = Dense::zeros(fc_mid2.out, fc_mid2.in);
  g.fc_mid3 = Dense::zeros(fc_mid3.out, fc_mid3.in);
  g.fc_h1 = Dense::zeros(fc_h1.out, fc_h1.in);
  g.fc_h2 = Dense::zeros(fc_h2.out, fc_h2.in);
  g.fc_out = Dense::zeros(fc_out.out, fc_out.in);
  g.bn1.mean.assign(W, 0.0);
  g.bn1.var.assign(W, 0.0);
  g.bn2 = g.bn1;
  g.bn3 = g.bn1;
  g.bn_momentum = bn_momentum;
  g.bn_eps = bn_eps;
  return g;
}

bool DecoderParams::all_finite() const {
  for (auto block : param_blocks())
    for (double x : block)
      if (!std::isfinite(x)) return false;
  for (const BatchNormStats* bn : {&bn1, &bn2, &bn3})
    for (const auto* v : {&bn->mean, &bn->var})
      for (double x : *v)
        if (!std::isfinite(x)) return false;
  return true;
}

std::vector<std::span<double>> DecoderParams::param_blocks() {
  std::vector<std::span<double>> out;
  for (Dense* d : {&proj1, &proj2, &proj3, &fc_in, &fc_mid2, &fc_mid3, &fc_h1,
                   &fc_h2, &fc_out}) {
    out.emplace_back(d->w);
    out.emplace_back(d->b);
  }
  return out;
}

std::vector<std::span<const double>> DecoderParams::param_blocks() const {
  std::vector<std::span<const double>> out;
  for (const Dense* d : {&proj1, &proj2, &proj3, &fc_in, &fc_mid2, &fc_mid3,
                         &fc_h1, &fc_h2, &fc_out}) {
    out.emplace_back(d->w);
    out.emplace_back(d->b);
  }
  return out;
}

std::vector<std::string> DecoderParams::param_block_names() const {
  std::vector<std::string> out;
  for (const char* n : {"proj1", "proj2", "proj3", "fc_in", "fc_mid2",
                        "fc_mid3", "fc_h1", "fc_h2", "fc_out"}) {
    out.push_back(std::string(n) + ".w");
    out.push_back(std::string(n) + ".b");
  }
  return out;
}

std::vector<double> forward_batch(const DecoderParams& params,
                                  std::span<const SupportEval> evals,
                                  RunMode mode, ForwardCache* cache) {
  size_t n = evals.size();
  if (n == 0) fail(ErrorCode::argument, "empty evaluation batch");
  for (const SupportEval& e : evals)
    if (e.c1 == nullptr || e.c2 == nullptr || e.c3 == nullptr)
      fail(ErrorCode::argument, "null conditioning pointer");

  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  c = ForwardCache{};
  c.mode = mode;
  c.n = n;
  c.k = params.logit_dim();
  c.evals.assign(evals.begin(), evals.end());

  c.t1 = build_proj_table(params.proj1, evals, 1, {params.d1});
  c.t2 = build_proj_table(params.proj2, evals, 2, {params.d1, params.d2});
  c.t3 = build_proj_table(params.proj3, evals, 3,
                          {params.d1, params.d2, params.d3});
  check_finite(c.t1.out, "proj1");
  check_finite(c.t2.out, "proj2");
  check_finite(c.t3.out, "proj3");

  std::vector<double> h(n * W);

  // block 1: fc_in(p1) + norm + conditioning + relu
  dense_forward(params.fc_in, n,
                [&](size_t i, double* x) {
                  x[0] = evals[i].p1.x;
                  x[1] = evals[i].p1.y;
                  x[2] = evals[i].p1.z;
                },
                h.data());
  check_finite(h, "fc_in");
  bn_forward(params.bn1, params.bn_eps, mode, n, h.data(), c.bn1);
  condition_relu(c.t1, n, c.bn1, c.r1, "cond1");

  // block 2: fc_mid2([r1, p2]) + norm + conditioning + relu
  dense_forward(params.fc_mid2, n,
                [&](size_t i, double* x) {
                  std::memcpy(x, c.r1.data() + i * W, sizeof(double) * W);
                  x[W + 0] = evals[i].p2.x;
                  x[W + 1] = evals[i].p2.y;
                  x[W + 2] = evals[i].p2.z;
                },
                h.data());
  check_finite(h, "fc_mid2");
  bn_forward(params.bn2, params.bn_eps, mode, n, h.data(), c.bn2);
  condition_relu(c.t2, n, c.bn2, c.r2, "cond2");

  // block 3: fc_mid3([r2, p3]) + norm + conditioning + relu
  dense_forward(params.fc_mid3, n,
                [&](size_t i, double* x) {
                  std::memcpy(x, c.r2.data() + i * W, sizeof(double) * W);
                  x[W + 0] = evals[i].p3.x;
                  x[W + 1] = evals[i].p3.y;
                  x[W + 2] = evals[i].p3.z;
                },
                h.data());
  check_finite(h, "fc_mid3");
  bn_forward(params.bn3, params.bn_eps, mode, n, h.data(), c.bn3);
  condition_relu(c.t3, n, c.bn3, c.r3, "cond3");

  // two plain hidden layers
  c.h4.assign(n * W, 0.0);
  dense_forward(params.fc_h1, n,
                [&](size_t i, double* x) {
                  std::memcpy(x, c.r3.data() + i * W, sizeof(double) * W);
                },
                c.h4.data());
  for (double& v : c.h4) v = v > 0.0 ? v : 0.0;
  check_finite(c.h4, "fc_h1");
  c.h5.assign(n * W, 0.0);
  dense_forward(params.fc_h2, n,
                [&](size_t i, double* x) {
                  std::memcpy(x, c.h4.data() + i * W, sizeof(double) * W);
                },
                c.h5.data());
  for (double& v : c.h5) v = v > 0.0 ? v : 0.0;
  check_finite(c.h5, "fc_h2");

  std::vector<double> logits(n * c.k);
  dense_forward(params.fc_out, n,
                [&](size_t i, double* x) {
                  std::memcpy(x, c.h5.data() + i * W, sizeof(double) * W);
                },
                logits.data());
  check_finite(logits, "fc_out");
  return logits;
}

BackwardResult backward_batch(const DecoderParams& params, ForwardCache& cache,
                              std::span<const double> upstream) {
  if (cache.consumed)
    fail(ErrorCode::usage, "forward cache already consumed by backward");
  cache.consumed = true;
  size_t n = cache.n;
  int k = cache.k;
  if (upstream.size() != n * static_cast<size_t>(k))
    fail(ErrorCode::argument, "upstream gradient size mismatch");

  BackwardResult res;
  res.param_grads = params.zeros_like();
  res.dcoords.assign(n * 9, 0.0);

  std::vector<double> d_h5(n * W, 0.0);
  dense_backward(params.fc_out, n,
                 [&](size_t i, double* x) {
                   std::memcpy(x, cache.h5.data() + i * W, sizeof(double) * W);
                 },
                 upstream.data(), res.param_grads.fc_out, d_h5.data());
  relu_backward_inplace(cache.h5, d_h5.data(), n * W);

  std::vector<double> d_h4(n * W, 0.0);
  dense_backward(params.fc_h2, n,
                 [&](size_t i, double* x) {
                   std::memcpy(x, cache.h4.data() + i * W, sizeof(double) * W);
                 },
                 d_h5.data(), res.param_grads.fc_h2, d_h4.data());
  relu_backward_inplace(cache.h4, d_h4.data(), n * W);

  std::vector<double> d_r3(n * W, 0.0);
  dense_backward(params.fc_h1, n,
                 [&](size_t i, double* x) {
                   std::memcpy(x, cache.r3.data() + i * W, sizeof(double) * W);
                 },
                 d_h4.data(), res.param_grads.fc_h1, d_r3.data());

  // block 3 backward
  std::vector<double> dproj3_out, dxhat(n * W, 0.0), dh(n * W, 0.0);
  condition_relu_backward(cache.t3, n, cache.bn3, cache.r3, d_r3.data(),
                          dproj3_out, dxhat.data());
  bn_backward(cache.bn3, cache.mode, n, dxhat.data(), dh.data());
  std::vector<double> d_x2(n * (W + 3), 0.0);
  dense_backward(params.fc_mid3, n,
                 [&](size_t i, double* x) {
                   std::memcpy(x, cache.r2.data() + i * W, sizeof(double) * W);
                   x[W + 0] = cache.evals[i].p3.x;
                   x[W + 1] = cache.evals[i].p3.y;
                   x[W + 2] = cache.evals[i].p3.z;
                 },
                 dh.data(), res.param_grads.fc_mid3, d_x2.data());
  std::vector<double> d_r2(n * W, 0.0);
  for (size_t i = 0; i < n; ++i) {
    std::memcpy(d_r2.data() + i * W, d_x2.data() + i * (W + 3),
                sizeof(double) * W);
    res.dcoords[i * 9 + 6] = d_x2[i * (W + 3) + W + 0];
    res.dcoords[i * 9 + 7] = d_x2[i * (W + 3) + W + 1];
    res.dcoords[i * 9 + 8] = d_x2[i * (W + 3) + W + 2];
  }

  // block 2 backward
  std::vector<double> dproj2_out;
  condition_relu_backward(cache.t2, n, cache.bn2, cache.r2, d_r2.data(),
                          dproj2_out, dxhat.data());
  bn_backward(cache.bn2, cache.mode, n, dxhat.data(), dh.data());
  std::vector<double> d_x1(n * (W + 3), 0.0);
  dense_backward(params.fc_mid2, n,
                 [&](size_t i, double* x) {
                   std::memcpy(x, cache.r1.data() + i * W, sizeof(double) * W);
                   x[W + 0] = cache.evals[i].p2.x;
                   x[W + 1] = cache.evals[i].p2.y;
                   x[W + 2] = cache.evals[i].p2.z;
                 },
                 dh.data(), res.param_grads.fc_mid2, d_x1.data());
  std::vector<double> d_r1(n * W, 0.0);
  for (size_t i = 0; i < n; ++i) {
    std::memcpy(d_r1.data() + i * W, d_x1.data() + i * (W + 3),
                sizeof(double) * W);
    res.dcoords[i * 9 + 3] = d_x1[i * (W + 3) + W + 0];
    res.dcoords[i * 9 + 4] = d_x1[i * (W + 3) + W + 1];
    res.dcoords[i * 9 + 5] = d_x1[i * (W + 3) + W + 2];
  }

  // block 1 backward
  std::vector<double> dproj1_out;
  condition_relu_backward(cache.t1, n, cache.bn1, cache.r1, d_r1.data(),
                          dproj1_out, dxhat.data());
  bn_backward(cache.bn1, cache.mode, n, dxhat.data(), dh.data());
  std::vector<double> d_x0(n * 3, 0.0);
  dense_backward(params.fc_in, n,
                 [&](size_t i, double* x) {
                   x[0] = cache.evals[i].p1.x;
                   x[1] = cache.evals[i].p1.y;
                   x[2] = cache.evals[i].p1.z;
                 },
                 dh.data(), res.param_grads.fc_in, d_x0.data());
  for (size_t i = 0; i < n; ++i) {
    res.dcoords[i * 9 + 0] = d_x0[i * 3 + 0];
    res.dcoords[i * 9 + 1] = d_x0[i * 3 + 1];
    res.dcoords[i * 9 + 2] = d_x0[i * 3 + 2];
  }

  // projections
  proj_backward(params.proj1, cache.t1, dproj1_out, res.param_grads.proj1,
                res.dproj1_in);
  proj_backward(params.proj2, cache.t2, dproj2_out, res.param_grads.proj2,
                res.dproj2_in);
  proj_backward(params.proj3, cache.t3, dproj3_out, res.param_grads.proj3,
                res.dproj3_in);
  res.proj1_keys = cache.t1.keys;
  res.proj2_keys = cache.t2.keys;
  res.proj3_keys = cache.t3.keys;
  return res;
}

void BackwardResult::scatter_latent_grads(LatentGrid& gg) const {
  const GridConfig& cfg = gg.config;
  size_t u1 = proj1_keys.size();
  for (size_t u = 0; u < u1; ++u) {
    uint64_t key = proj1_keys[u][0];
    if (key == kNoKey) fail(ErrorCode::usage, "cannot scatter without keys");
    double* dst = gg.entry(1, key);
    const double* src = dproj1_in.data() + u * cfg.d1;
    for (int i = 0; i < cfg.d1; ++i) dst[i] += src[i];
  }
  for (size_t u = 0; u < proj2_keys.size(); ++u) {
    uint64_t k1 = proj2_keys[u][0], k2 = proj2_keys[u][1];
    if (k1 == kNoKey || k2 == kNoKey)
      fail(ErrorCode::usage, "cannot scatter without keys");
    const double* src = dproj2_in.data() + u * (cfg.d1 + cfg.d2);
    double* dst1 = gg.entry(1, k1);
    for (int i = 0; i < cfg.d1; ++i) dst1[i] += src[i];
    double* dst2 = gg.entry(2, k2);
    for (int i = 0; i < cfg.d2; ++i) dst2[i] += src[cfg.d1 + i];
  }
  for (size_t u = 0; u < proj3_keys.size(); ++u) {
    uint64_t k1 = proj3_keys[u][0], k2 = proj3_keys[u][1],
             k3 = proj3_keys[u][2];
    if (k1 == kNoKey || k2 == kNoKey || k3 == kNoKey)
      fail(ErrorCode::usage, "cannot scatter without keys");
    const double* src = dproj3_in.data() + u * (cfg.d1 + cfg.d2 + cfg.d3);
    double* dst1 = gg.entry(1, k1);
    for (int i = 0; i < cfg.d1; ++i) dst1[i] += src[i];
    double* dst2 = gg.entry(2, k2);
    for (int i = 0; i < cfg.d2; ++i) dst2[i] += src[cfg.d1 + i];
    double* dst3 = gg.entry(3, k3);
    for (int i = 0; i < cfg.d3; ++i) dst3[i] += src[cfg.d1 + cfg.d2 + i];
  }
}

void update_running_stats(DecoderParams& params, const ForwardCache& cache) {
  if (cache.mode != RunMode::train)
    fail(ErrorCode::usage, "running stats update needs a train-mode cache");
  double m = params.bn_momentum;
  auto fold = [m](BatchNormStats& bn, const decoder_detail::BNCache& c) {
    for (int j = 0; j < W; ++j) {
      bn.mean[j] = m * bn.mean[j] + (1.0 - m) * c.batch_mean[j];
      bn.var[j] = m * bn.var[j] + (1.0 - m) * c.batch_var[j];
    }
  };
  fold(params.bn1, cache.bn1);
  fold(params.bn2, cache.bn2);
  fold(params.bn3, cache.bn3);
}

std::vector<double> predict(const DecoderParams& params, const LatentGrid& grid,
                            const Vec3& p) {
  SupportRegion region = support_region(p, grid.config);
  auto entries = gather(grid, region);
  std::array<SupportEval, 4> evals;
  std::array<double, 4> weights;
  for (int s = 0; s < 4; ++s) {
    evals[s] = to_eval(entries[s]);
    weights[s] = entries[s].weight;
  }
  std::vector<double> z = forward_batch(params, evals, RunMode::infer, nullptr);
  int k = params.logit_dim();
  std::vector<double> out(k, 0.0), prob(k);
  for (int s = 0; s < 4; ++s) {
    stable_softmax({z.data() + static_cast<size_t>(s) * k,
                    static_cast<size_t>(k)},
                   prob);
    for (int i = 0; i < k; ++i) out[i] += weights[s] * prob[i];
  }
  return out;
}

FreeSpaceGrad free_space_with_grad(const DecoderParams& params,
                                   const LatentGrid& grid, const Vec3& p) {
  SupportRegion region = support_region(p, grid.config);
  auto entries = gather(grid, region);
  std::array<SupportEval, 4> evals;
  for (int s = 0; s < 4; ++s) evals[s] = to_eval(entries[s]);

  ForwardCache cache;
  std::vector<double> z =
      forward_batch(params, evals, RunMode::infer, &cache);
  int k = params.logit_dim();
  int free_i = k - 1;

  FreeSpaceGrad out;
  std::vector<double> upstream(4 * k, 0.0), prob(k);
  std::array<double, 4> s_free;
  for (int s = 0; s < 4; ++s) {
    stable_softmax({z.data() + static_cast<size_t>(s) * k,
                    static_cast<size_t>(k)},
                   prob);
    s_free[s] = prob[free_i];
    double w = entries[s].weight;
    out.value += w * prob[free_i];
    // d f_free / d z_j for this support, scaled by its weight
    for (int j = 0; j < k; ++j)
      upstream[static_cast<size_t>(s) * k + j] =
          w * prob[free_i] * ((j == free_i ? 1.0 : 0.0) - prob[j]);
  }
  BackwardResult bw = backward_batch(params, cache, upstream);
  for (int s = 0; s < 4; ++s) {
    const double* d = bw.dcoords.data() + static_cast<size_t>(s) * 9;
    // p1, p2 and p3 all shift one-to-one with p
    out.grad += Vec3{d[0] + d[3] + d[6], d[1] + d[4] + d[7],
                     d[2] + d[5] + d[8]};
    out.grad += region.weight_gradients[s] * s_free[s];
  }
  return out;
}

void decoder_params_to_container(const DecoderParams& p, Container& c,
                                 const std::string& prefix) {
  std::vector<int32_t> shape{p.n_classes, p.d1, p.d2, p.d3};
  c.add_i32(prefix + "shape", shape);
  std::vector<double> bn_cfg{p.bn_momentum, p.bn_eps};
  c.add_f64(prefix + "bn_cfg", bn_cfg);
  auto names = p.param_block_names();
  auto blocks = p.param_blocks();
  for (size_t i = 0; i < blocks.size(); ++i)
    c.add_f64(prefix + names[i],
              std::span<const double>(blocks[i].data(), blocks[i].size()));
  c.add_f64(prefix + "bn1.mean", p.bn1.mean);
  c.add_f64(prefix + "bn1.var", p.bn1.var);
  c.add_f64(prefix + "bn2.mean", p.bn2.mean);
  c.add_f64(prefix + "bn2.var", p.bn2.var);
  c.add_f64(prefix + "bn3.mean", p.bn3.mean);
  c.add_f64(prefix + "bn3.var", p.bn3.var);
}

DecoderParams decoder_params_from_container(const Container& c,
                                            const std::string& prefix) {
  auto shape = c.get_i32(prefix + "shape");
  auto bn_cfg = c.get_f64(prefix + "bn_cfg");
  if (shape.size() != 4 || bn_cfg.size() != 2)
    fail(ErrorCode::format, "bad decoder parameter block");
  Rng dummy(0);
  DecoderParams p =
      DecoderParams::init(shape[0], shape[1], shape[2], shape[3], dummy);
  p.bn_momentum = bn_cfg[0];
  p.bn_eps = bn_cfg[1];
  auto names = p.param_block_names();
  auto blocks = p.param_blocks();
  for (size_t i = 0; i < blocks.size(); ++i) {
    auto v = c.get_f64(prefix + names[i]);
    if (v.size() != blocks[i].size())
      fail(ErrorCode::format, "decoder block size mismatch: " + names[i]);
    std::copy(v.begin(), v.end(), blocks[i].begin());
  }
  p.bn1.mean = c.get_f64(prefix + "bn1.mean");
  p.bn1.var = c.get_f64(prefix + "bn1.var");
  p.bn2.mean = c.get_f64(prefix + "bn2.mean");
  p.bn2.var = c.get_f64(prefix + "bn2.var");
  p.bn3.mean = c.get_f64(prefix + "bn3.mean");
  p.bn3.var = c.get_f64(prefix + "bn3.var");
  for (const BatchNormStats* bn : {&p.bn1, &p.bn2, &p.bn3})
    if (bn->mean.size() != W || bn->var.size() != W)
      fail(ErrorCode::format, "bad normalization statistics size");
  if (!p.all_finite()) fail(ErrorCode::data, "non-finite decoder parameters");
  return p;
}

}  // namespace scn
