#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/decoder.hpp"
#include "core/error.hpp"
#include "core/numerics.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

using namespace scn;

namespace {

constexpr int W = DecoderParams::kWidth;

struct Fixture {
  DecoderParams params;
  std::vector<std::vector<double>> c_store;  // backing conditioning vectors
  std::vector<SupportEval> evals;
};

DecoderParams random_params(Rng& rng, int n_classes, int d1, int d2, int d3) {
  DecoderParams p = DecoderParams::init(n_classes, d1, d2, d3, rng);
  for (auto block : p.param_blocks())
    for (double& v : block) v = rng.uniform(-0.7, 0.7);
  for (BatchNormStats* bn : {&p.bn1, &p.bn2, &p.bn3})
    for (int j = 0; j < W; ++j) {
      bn->mean[j] = rng.uniform(-0.5, 0.5);
      bn->var[j] = rng.uniform(0.5, 1.5);
    }
  return p;
}

Fixture random_fixture(uint64_t seed, size_t n_evals, int n_classes = 4,
                       int d1 = 5, int d2 = 4, int d3 = 3) {
  Rng rng(seed);
  Fixture f;
  f.params = random_params(rng, n_classes, d1, d2, d3);
  f.c_store.resize(n_evals * 3);
  for (size_t e = 0; e < n_evals; ++e) {
    auto& c1 = f.c_store[e * 3 + 0];
    auto& c2 = f.c_store[e * 3 + 1];
    auto& c3 = f.c_store[e * 3 + 2];
    c1.resize(d1);
    c2.resize(d2);
    c3.resize(d3);
    for (auto* v : {&c1, &c2, &c3})
      for (double& x : *v) x = rng.uniform(-1.0, 1.0);
    SupportEval ev;
    ev.c1 = c1.data();
    ev.c2 = c2.data();
    ev.c3 = c3.data();
    ev.p1 = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    ev.p2 = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    ev.p3 = {rng.uniform(-.5, .5), rng.uniform(-.5, .5), rng.uniform(-.5, .5)};
    f.evals.push_back(ev);
  }
  return f;
}

// Independent straight-line recomputation of the decoder, kept free of any
// production helper so it can serve as an oracle. Also reports the smallest
// |pre-activation| across every rectifier input for kink screening.
std::vector<double> oracle_forward(const DecoderParams& P,
                                   const std::vector<SupportEval>& evals,
                                   bool train, double* min_preact = nullptr) {
  size_t n = evals.size();
  int K = P.n_classes + 1;
  double min_pre = 1e300;
  auto dense = [](const Dense& d, const std::vector<double>& x) {
    std::vector<double> y(d.out);
    for (int o = 0; o < d.out; ++o) {
      double s = d.b[o];
      for (int i = 0; i < d.in; ++i) s += d.w[o * d.in + i] * x[i];
      y[o] = s;
    }
    return y;
  };
  // per-eval conditioning
  std::vector<std::vector<double>> cond1(n), cond2(n), cond3(n);
  for (size_t e = 0; e < n; ++e) {
    std::vector<double> in1(P.d1), in2(P.d1 + P.d2), in3(P.d1 + P.d2 + P.d3);
    for (int i = 0; i < P.d1; ++i) in1[i] = evals[e].c1[i];
    for (int i = 0; i < P.d1; ++i) in2[i] = evals[e].c1[i];
    for (int i = 0; i < P.d2; ++i) in2[P.d1 + i] = evals[e].c2[i];
    for (int i = 0; i < P.d1; ++i) in3[i] = evals[e].c1[i];
    for (int i = 0; i < P.d2; ++i) in3[P.d1 + i] = evals[e].c2[i];
    for (int i = 0; i < P.d3; ++i) in3[P.d1 + P.d2 + i] = evals[e].c3[i];
    cond1[e] = dense(P.proj1, in1);
    cond2[e] = dense(P.proj2, in2);
    cond3[e] = dense(P.proj3, in3);
  }
  auto bn = [&](std::vector<std::vector<double>>& h,
                const BatchNormStats& run) {
    std::vector<double> mean(W, 0.0), var(W, 0.0);
    if (train) {
      for (auto& row : h)
        for (int j = 0; j < W; ++j) mean[j] += row[j];
      for (int j = 0; j < W; ++j) mean[j] /= static_cast<double>(n);
      for (auto& row : h)
        for (int j = 0; j < W; ++j)
          var[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
      for (int j = 0; j < W; ++j) var[j] /= static_cast<double>(n);
    } else {
      mean = run.mean;
      var = run.var;
    }
    for (auto& row : h)
      for (int j = 0; j < W; ++j)
        row[j] = (row[j] - mean[j]) / std::sqrt(var[j] + P.bn_eps);
  };
  auto cond_relu = [&](std::vector<std::vector<double>>& h,
                       const std::vector<std::vector<double>>& cond) {
    for (size_t e = 0; e < n; ++e)
      for (int j = 0; j < W; ++j) {
        double y = cond[e][j] * h[e][j] + cond[e][W + j];
        min_pre = std::min(min_pre, std::abs(y));
        h[e][j] = y > 0.0 ? y : 0.0;
      }
  };

  std::vector<std::vector<double>> h(n);
  for (size_t e = 0; e < n; ++e)
    h[e] = dense(P.fc_in,
                 {evals[e].p1.x, evals[e].p1.y, evals[e].p1.z});
  bn(h, P.bn1);
  cond_relu(h, cond1);
  for (size_t e = 0; e < n; ++e) {
    std::vector<double> x(h[e]);
    x.push_back(evals[e].p2.x);
    x.push_back(evals[e].p2.y);
    x.push_back(evals[e].p2.z);
    h[e] = dense(P.fc_mid2, x);
  }
  bn(h, P.bn2);
  cond_relu(h, cond2);
  for (size_t e = 0; e < n; ++e) {
    std::vector<double> x(h[e]);
    x.push_back(evals[e].p3.x);
    x.push_back(evals[e].p3.y);
    x.push_back(evals[e].p3.z);
    h[e] = dense(P.fc_mid3, x);
  }
  bn(h, P.bn3);
  cond_relu(h, cond3);
  std::vector<double> out(n * K);
  for (size_t e = 0; e < n; ++e) {
    std::vector<double> a = dense(P.fc_h1, h[e]);
    for (double& v : a) {
      min_pre = std::min(min_pre, std::abs(v));
      v = v > 0.0 ? v : 0.0;
    }
    std::vector<double> b = dense(P.fc_h2, a);
    for (double& v : b) {
      min_pre = std::min(min_pre, std::abs(v));
      v = v > 0.0 ? v : 0.0;
    }
    std::vector<double> z = dense(P.fc_out, b);
    for (int j = 0; j < K; ++j) out[e * K + j] = z[j];
  }
  if (min_preact != nullptr) *min_preact = min_pre;
  return out;
}

}  // namespace

TEST_CASE("forward matches an independent straight-line recomputation") {
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    Fixture f = random_fixture(seed, 7);
    for (RunMode mode : {RunMode::train, RunMode::infer}) {
      std::vector<double> got = forward_batch(f.params, f.evals, mode, nullptr);
      std::vector<double> want =
          oracle_forward(f.params, f.evals, mode == RunMode::train);
      REQUIRE(got.size() == want.size());
      for (size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) <= 1e-12);
    }
  }
}

TEST_CASE("all-zero parameters collapse to the output bias") {
  Rng rng(5);
  DecoderParams p = DecoderParams::init(3, 4, 4, 4, rng);
  for (auto block : p.param_blocks())
    for (double& v : block) v = 0.0;
  p.fc_out.b = {0.5, -1.0, 2.0, 0.25};

  Fixture f = random_fixture(99, 3, 3, 4, 4, 4);
  std::vector<double> z = forward_batch(p, f.evals, RunMode::infer, nullptr);
  for (size_t e = 0; e < 3; ++e)
    for (int j = 0; j < 4; ++j)
      CHECK(z[e * 4 + j] == doctest::Approx(p.fc_out.b[j]).epsilon(1e-15));
}

TEST_CASE("infer mode is deterministic bit for bit") {
  Fixture f = random_fixture(17, 5);
  std::vector<double> a = forward_batch(f.params, f.evals, RunMode::infer,
                                        nullptr);
  std::vector<double> b = forward_batch(f.params, f.evals, RunMode::infer,
                                        nullptr);
  CHECK(a == b);
}

TEST_CASE("backward gradients match central finite differences") {
  // Seeds are screened so no rectifier input sits within reach of the
  // finite-difference step; at a kink the two-sided difference is not the
  // derivative.
  const double h = 1e-5;
  int checked_seeds = 0;
  for (uint64_t seed = 100; seed < 200 && checked_seeds < 10; ++seed) {
    Fixture f = random_fixture(seed, 6);
    double min_pre = 0.0;
    oracle_forward(f.params, f.evals, true, &min_pre);
    if (min_pre < 5e-4) continue;
    ++checked_seeds;

    size_t n = f.evals.size();
    int k = f.params.logit_dim();
    Rng urng(seed * 31 + 7);
    std::vector<double> upstream(n * k);
    for (double& v : upstream) v = urng.uniform(-1.0, 1.0);

    auto phi = [&]() {
      std::vector<double> z =
          forward_batch(f.params, f.evals, RunMode::train, nullptr);
      double s = 0.0;
      for (size_t i = 0; i < z.size(); ++i) s += upstream[i] * z[i];
      return s;
    };

    ForwardCache cache;
    forward_batch(f.params, f.evals, RunMode::train, &cache);
    BackwardResult bw = backward_batch(f.params, cache, upstream);

    double worst = 0.0;
    // parameters
    auto blocks = f.params.param_blocks();
    auto grad_blocks = bw.param_grads.param_blocks();
    for (size_t b = 0; b < blocks.size(); ++b)
      for (size_t i = 0; i < blocks[b].size(); ++i) {
        double fd = testutil::numeric_grad(phi, &blocks[b][i], h);
        worst = std::max(worst,
                         testutil::grad_violation(grad_blocks[b][i], fd));
      }
    // conditioning inputs (each eval has unique storage here)
    for (size_t e = 0; e < n; ++e) {
      const double* rows[3] = {bw.dproj1_in.data() + e * f.params.d1,
                               bw.dproj2_in.data() +
                                   e * (f.params.d1 + f.params.d2),
                               bw.dproj3_in.data() +
                                   e * (f.params.d1 + f.params.d2 +
                                        f.params.d3)};
      // d/d c1 accumulates over all three projections
      for (int i = 0; i < f.params.d1; ++i) {
        double analytic = rows[0][i] + rows[1][i] + rows[2][i];
        double fd = testutil::numeric_grad(phi, &f.c_store[e * 3 + 0][i], h);
        worst = std::max(worst, testutil::grad_violation(analytic, fd));
      }
      for (int i = 0; i < f.params.d2; ++i) {
        double analytic =
            rows[1][f.params.d1 + i] + rows[2][f.params.d1 + i];
        double fd = testutil::numeric_grad(phi, &f.c_store[e * 3 + 1][i], h);
        worst = std::max(worst, testutil::grad_violation(analytic, fd));
      }
      for (int i = 0; i < f.params.d3; ++i) {
        double analytic = rows[2][f.params.d1 + f.params.d2 + i];
        double fd = testutil::numeric_grad(phi, &f.c_store[e * 3 + 2][i], h);
        worst = std::max(worst, testutil::grad_violation(analytic, fd));
      }
      // coordinates
      double* coords[9] = {&f.evals[e].p1.x, &f.evals[e].p1.y,
                           &f.evals[e].p1.z, &f.evals[e].p2.x,
                           &f.evals[e].p2.y, &f.evals[e].p2.z,
                           &f.evals[e].p3.x, &f.evals[e].p3.y,
                           &f.evals[e].p3.z};
      for (int i = 0; i < 9; ++i) {
        double fd = testutil::numeric_grad(phi, coords[i], h);
        worst = std::max(worst,
                         testutil::grad_violation(bw.dcoords[e * 9 + i], fd));
      }
    }
    INFO("seed ", seed, " worst violation ratio ", worst);
    CHECK(worst <= 1.0);
  }
  CHECK(checked_seeds == 10);
}

TEST_CASE("upstream of zeros produces zero gradients") {
  Fixture f = random_fixture(55, 4);
  ForwardCache cache;
  forward_batch(f.params, f.evals, RunMode::train, &cache);
  std::vector<double> upstream(4 * f.params.logit_dim(), 0.0);
  BackwardResult bw = backward_batch(f.params, cache, upstream);
  for (auto block : bw.param_grads.param_blocks())
    for (double v : block) CHECK(v == 0.0);
  for (double v : bw.dcoords) CHECK(v == 0.0);
}

TEST_CASE("a cache cannot be consumed twice") {
  Fixture f = random_fixture(56, 3);
  ForwardCache cache;
  forward_batch(f.params, f.evals, RunMode::train, &cache);
  std::vector<double> upstream(3 * f.params.logit_dim(), 0.0);
  backward_batch(f.params, cache, upstream);
  CHECK_THROWS_AS(backward_batch(f.params, cache, upstream), Error);
}

TEST_CASE("predict equals an external softmax-compose recomputation") {
  GridConfig cfg;
  cfg.delta = 0.32;
  cfg.cells_x = 32;
  cfg.cells_y = 32;
  cfg.d1 = 5;
  cfg.d2 = 4;
  cfg.d3 = 3;
  Rng rng(61);
  DecoderParams params = random_params(rng, 4, 5, 4, 3);
  LatentGrid grid = LatentGrid::zeros(cfg);
  for (auto* level : {&grid.level1, &grid.level2, &grid.level3})
    for (double& v : *level) v = rng.normal(0.0, 0.3);

  for (int rep = 0; rep < 50; ++rep) {
    Vec3 p{rng.uniform(1.0, 9.0), rng.uniform(1.0, 9.0), rng.uniform(-2, 2)};
    std::vector<double> got = predict(params, grid, p);
    double sum = 0.0;
    for (double v : got) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-9);

    SupportRegion region = support_region(p, cfg);
    auto entries = gather(grid, region);
    std::array<SupportEval, 4> evals;
    for (int s = 0; s < 4; ++s) evals[s] = to_eval(entries[s]);
    std::vector<double> z =
        forward_batch(params, evals, RunMode::infer, nullptr);
    int k = params.logit_dim();
    std::vector<double> want(k, 0.0), prob(k);
    for (int s = 0; s < 4; ++s) {
      stable_softmax({z.data() + static_cast<size_t>(s) * k,
                      static_cast<size_t>(k)},
                     prob);
      for (int i = 0; i < k; ++i) want[i] += entries[s].weight * prob[i];
    }
    for (int i = 0; i < k; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12);
  }
}

TEST_CASE("constant grid makes predictions translation symmetric") {
  GridConfig cfg;
  cfg.delta = 0.32;
  cfg.cells_x = 64;
  cfg.cells_y = 64;
  cfg.d1 = 5;
  cfg.d2 = 4;
  cfg.d3 = 3;
  Rng rng(67);
  DecoderParams params = random_params(rng, 4, 5, 4, 3);
  LatentGrid grid = LatentGrid::zeros(cfg);
  std::vector<double> v1(cfg.d1), v2(cfg.d2), v3(cfg.d3);
  for (auto* v : {&v1, &v2, &v3})
    for (double& x : *v) x = rng.uniform(-0.8, 0.8);
  for (size_t i = 0; i < grid.entry_count(1); ++i)
    std::copy(v1.begin(), v1.end(), grid.entry(1, i));
  for (size_t i = 0; i < grid.entry_count(2); ++i)
    std::copy(v2.begin(), v2.end(), grid.entry(2, i));
  for (size_t i = 0; i < grid.entry_count(3); ++i)
    std::copy(v3.begin(), v3.end(), grid.entry(3, i));

  double shift = 16.0 * cfg.delta;  // one full coarsest cell
  for (int rep = 0; rep < 20; ++rep) {
    Vec3 p{rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0), rng.uniform(-2, 2)};
    auto a = predict(params, grid, p);
    auto b = predict(params, grid, p + Vec3{shift, shift, 0.0});
    for (size_t i = 0; i < a.size(); ++i)
      CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  }
}

TEST_CASE("two-class head with fixed bias gives the logistic value") {
  Rng rng(71);
  DecoderParams p = DecoderParams::init(1, 4, 4, 4, rng);
  for (auto block : p.param_blocks())
    for (double& v : block) v = 0.0;
  p.fc_out.b = {10.0, -10.0};

  GridConfig cfg;
  cfg.delta = 0.32;
  cfg.cells_x = 16;
  cfg.cells_y = 16;
  cfg.d1 = 4;
  cfg.d2 = 4;
  cfg.d3 = 4;
  LatentGrid grid = LatentGrid::zeros(cfg);
  auto out = predict(p, grid, {2.5, 2.5, 0.7});
  CHECK(out[0] == doctest::Approx(1.0 / (1.0 + std::exp(-20.0)))
                      .epsilon(1e-12));
}

TEST_CASE("decoder parameters round-trip through the container") {
  Fixture f = random_fixture(73, 1);
  Container c;
  decoder_params_to_container(f.params, c, "dec.");
  DecoderParams back = decoder_params_from_container(c, "dec.");
  CHECK(back.n_classes == f.params.n_classes);
  auto a = f.params.param_blocks();
  auto b = back.param_blocks();
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) CHECK(a[i][j] == b[i][j]);
  CHECK(back.bn1.mean == f.params.bn1.mean);
  CHECK(back.bn3.var == f.params.bn3.var);
}
