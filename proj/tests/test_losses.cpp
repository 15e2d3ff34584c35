#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/error.hpp"
#include "core/losses.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

using namespace scn;

namespace {

// Probability-space reference implementations in extended precision.
std::vector<long double> softmax_naive(const std::vector<double>& z) {
  std::vector<long double> p(z.size());
  long double s = 0.0L;
  for (size_t i = 0; i < z.size(); ++i) {
    p[i] = expl(static_cast<long double>(z[i]));
    s += p[i];
  }
  for (auto& v : p) v /= s;
  return p;
}

double semantic_naive(const std::vector<std::vector<double>>& logits,
                      const std::vector<double>& w, int cls) {
  long double fbar = 0.0L;
  for (size_t a = 0; a < logits.size(); ++a)
    fbar += w[a] * softmax_naive(logits[a])[cls - 1];
  return static_cast<double>(-logl(fbar));
}

double geometric_naive(const std::vector<std::vector<double>>& logits,
                       const std::vector<double>& w, bool occupied) {
  long double q = 0.0L;
  for (size_t a = 0; a < logits.size(); ++a) {
    auto p = softmax_naive(logits[a]);
    long double occ = 0.0L;
    for (size_t i = 0; i + 1 < p.size(); ++i) occ += p[i];
    q += w[a] * (occupied ? occ : p.back());
  }
  return static_cast<double>(-logl(q));
}

double consistency_naive(const std::vector<std::vector<double>>& logits) {
  size_t m = logits.size(), k = logits[0].size();
  std::vector<std::vector<long double>> p(m);
  for (size_t a = 0; a < m; ++a) p[a] = softmax_naive(logits[a]);
  long double h_mix = 0.0L, mean_h = 0.0L;
  for (size_t i = 0; i < k; ++i) {
    long double pb = 0.0L;
    for (size_t a = 0; a < m; ++a) pb += p[a][i];
    pb /= m;
    if (pb > 0) h_mix -= pb * logl(pb);
  }
  for (size_t a = 0; a < m; ++a) {
    long double h = 0.0L;
    for (size_t i = 0; i < k; ++i)
      if (p[a][i] > 0) h -= p[a][i] * logl(p[a][i]);
    mean_h += h;
  }
  return static_cast<double>(h_mix - mean_h / m);
}

std::vector<std::vector<double>> random_logits(Rng& rng, size_t m, size_t k,
                                               double lo, double hi) {
  std::vector<std::vector<double>> out(m, std::vector<double>(k));
  for (auto& row : out)
    for (auto& v : row) v = rng.uniform(lo, hi);
  return out;
}

std::vector<double> random_weights(Rng& rng, size_t m) {
  std::vector<double> w(m);
  double s = 0;
  for (auto& v : w) {
    v = rng.uniform(0.05, 1.0);
    s += v;
  }
  for (auto& v : w) v /= s;
  return w;
}

}  // namespace

TEST_CASE("stable_logsoftmax matches hand values and stays finite") {
  std::vector<double> z{0.0, 0.0}, out(2);
  stable_logsoftmax(z, out);
  CHECK(out[0] == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  z = {1000.0, 0.0};
  stable_logsoftmax(z, out);
  CHECK(std::isfinite(out[0]));
  CHECK(std::isfinite(out[1]));
  CHECK(std::abs(out[0]) < 1e-300);  // -log(1+e^-1000)
  CHECK(out[1] == doctest::Approx(-1000.0).epsilon(1e-12));

  z = {1.0, 2.0, 3.0};
  std::vector<double> out3(3);
  stable_logsoftmax(z, out3);
  auto p = softmax_naive(z);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(out3[i] - static_cast<double>(logl(p[i]))) < 1e-12);

  // exp(out) sums to 1 for large finite inputs
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> big(8), ls(8);
    for (auto& v : big) v = rng.uniform(-700.0, 700.0);
    stable_logsoftmax(big, ls);
    double s = 0;
    for (double v : ls) s += std::exp(v);
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("semantic loss: saturation, uniform value, free-class misuse") {
  // two-class head, margin 20 on the true class
  LossGrad sat = semantic_loss({{20.0, 0.0}}, std::vector<double>{1.0}, 1);
  CHECK(sat.value <= 2.0 * std::exp(-20.0));
  CHECK(sat.value > 0.0);

  // uniform logits over N+1 = 20 classes
  std::vector<double> uni(20, 0.3);
  LossGrad u = semantic_loss({uni}, std::vector<double>{1.0}, 7);
  CHECK(u.value == doctest::Approx(std::log(20.0)).epsilon(1e-12));

  CHECK_THROWS_AS(semantic_loss({uni}, std::vector<double>{1.0}, 20),
                  Error);  // free space
  CHECK_THROWS_AS(semantic_loss({uni}, std::vector<double>{1.0}, 0), Error);
  CHECK_THROWS_AS(semantic_loss({uni}, std::vector<double>{-1.0, 2.0}, 3),
                  Error);
}

TEST_CASE("semantic loss matches the naive oracle and survives huge logits") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    size_t m = 1 + rng.below(4);
    auto logits = random_logits(rng, m, 20, -10.0, 10.0);
    auto w = random_weights(rng, m);
    int cls = 1 + static_cast<int>(rng.below(19));
    LossGrad g = semantic_loss(logits, w, cls);
    CHECK(std::abs(g.value - semantic_naive(logits, w, cls)) < 1e-10);
  }
  auto logits = random_logits(rng, 4, 20, -1e4, 1e4);
  auto w = random_weights(rng, 4);
  LossGrad g = semantic_loss(logits, w, 5);
  CHECK(std::isfinite(g.value));
  for (const auto& row : g.dlogits)
    for (double v : row) CHECK(std::isfinite(v));
}

TEST_CASE("semantic loss gradient vs finite differences") {
  Rng rng(13);
  auto logits = random_logits(rng, 3, 6, -2.0, 2.0);
  auto w = random_weights(rng, 3);
  LossGrad g = semantic_loss(logits, w, 2);
  for (size_t a = 0; a < 3; ++a)
    for (size_t j = 0; j < 6; ++j) {
      double fd = testutil::numeric_grad(
          [&] { return semantic_loss(logits, w, 2).value; }, &logits[a][j]);
      CHECK(testutil::rel_err(g.dlogits[a][j], fd) < 1e-6);
    }
}

TEST_CASE("geometric loss: uniform mass, fused-logit identity, asymptote") {
  std::vector<double> uni(20, -0.4);
  LossGrad u = geometric_loss({uni}, std::vector<double>{1.0}, true);
  CHECK(u.value == doctest::Approx(-std::log(19.0 / 20.0)).epsilon(1e-12));

  // softmax([z_occ, z_free]) == [sum_i f_i, f_free]
  Rng rng(17);
  for (int rep = 0; rep < 10000; ++rep) {
    std::vector<double> z(20);
    for (auto& v : z) v = rng.uniform(-20.0, 20.0);
    double z_occ, z_free;
    fuse_occupied_logits(z, &z_occ, &z_free);
    std::vector<double> two{z_occ, z_free}, p2(2);
    stable_softmax(two, p2);
    auto p = softmax_naive(z);
    long double occ = 0.0L;
    for (size_t i = 0; i + 1 < p.size(); ++i) occ += p[i];
    CHECK(std::abs(p2[0] - static_cast<double>(occ)) <= 1e-12);
    CHECK(std::abs(p2[1] - static_cast<double>(p.back())) <= 1e-12);
  }

  // occupied target but free logit dominates by 30
  LossGrad dom = geometric_loss({{0.0, 30.0}}, std::vector<double>{1.0}, true);
  CHECK(dom.value == doctest::Approx(30.0).epsilon(1e-6));
}

TEST_CASE("geometric loss oracle equivalence and gradient") {
  Rng rng(19);
  for (int rep = 0; rep < 200; ++rep) {
    size_t m = 1 + rng.below(4);
    auto logits = random_logits(rng, m, 20, -10.0, 10.0);
    auto w = random_weights(rng, m);
    bool occ = rng.below(2) == 0;
    LossGrad g = geometric_loss(logits, w, occ);
    CHECK(std::abs(g.value - geometric_naive(logits, w, occ)) < 1e-10);
  }
  auto logits = random_logits(rng, 2, 5, -2.0, 2.0);
  auto w = random_weights(rng, 2);
  for (bool occ : {true, false}) {
    LossGrad g = geometric_loss(logits, w, occ);
    for (size_t a = 0; a < 2; ++a)
      for (size_t j = 0; j < 5; ++j) {
        double fd = testutil::numeric_grad(
            [&] { return geometric_loss(logits, w, occ).value; },
            &logits[a][j]);
        CHECK(testutil::rel_err(g.dlogits[a][j], fd) < 1e-6);
      }
  }
  auto big = random_logits(rng, 4, 20, -1e4, 1e4);
  auto wb = random_weights(rng, 4);
  LossGrad g = geometric_loss(big, wb, true);
  CHECK(std::isfinite(g.value));
  for (const auto& row : g.dlogits)
    for (double v : row) CHECK(std::isfinite(v));
}

TEST_CASE("consistency loss: identities, bounds, known values") {
  // identical logit rows -> 0
  std::vector<double> row{1.0, -2.0, 0.5};
  LossGrad zero = consistency_loss({row, row, row});
  CHECK(std::abs(zero.value) <= 1e-12);

  // two nearly opposite one-hot distributions -> log 2
  LossGrad two = consistency_loss({{25.0, -25.0}, {-25.0, 25.0}});
  CHECK(two.value == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // [0.5,0.5] vs [1,0]: H(0.75,0.25) - 0.5*log2
  LossGrad half = consistency_loss({{0.0, 0.0}, {50.0, -50.0}});
  double expect = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)) -
                  0.5 * std::log(2.0);
  CHECK(half.value == doctest::Approx(expect).epsilon(1e-9));
  CHECK(half.value == doctest::Approx(0.215761).epsilon(1e-5));

  CHECK_THROWS_AS(consistency_loss({row}), Error);  // M < 2

  Rng rng(23);
  for (int rep = 0; rep < 500; ++rep) {
    size_t m = 2 + rng.below(3);
    auto logits = random_logits(rng, m, 7, -15.0, 15.0);
    LossGrad g = consistency_loss(logits);
    CHECK(g.value >= 0.0);
    CHECK(g.value <= std::log(static_cast<double>(m)) + 1e-12);
    CHECK(std::abs(g.value - consistency_naive(logits)) < 1e-10);
  }
}

TEST_CASE("consistency loss gradient vs finite differences") {
  Rng rng(29);
  auto logits = random_logits(rng, 4, 5, -3.0, 3.0);
  LossGrad g = consistency_loss(logits);
  for (size_t a = 0; a < 4; ++a)
    for (size_t j = 0; j < 5; ++j) {
      double fd = testutil::numeric_grad(
          [&] { return consistency_loss(logits).value; }, &logits[a][j]);
      CHECK(testutil::rel_err(g.dlogits[a][j], fd) < 1e-6);
    }
}

TEST_CASE("losses are invariant to shifting one support's logits") {
  Rng rng(31);
  auto logits = random_logits(rng, 3, 8, -5.0, 5.0);
  auto w = random_weights(rng, 3);
  double s0 = semantic_loss(logits, w, 3).value;
  double g0 = geometric_loss(logits, w, false).value;
  double c0 = consistency_loss(logits).value;
  for (double& v : logits[1]) v += 123.456;
  CHECK(std::abs(semantic_loss(logits, w, 3).value - s0) <= 1e-12);
  CHECK(std::abs(geometric_loss(logits, w, false).value - g0) <= 1e-12);
  CHECK(std::abs(consistency_loss(logits).value - c0) <= 1e-12);
}

TEST_CASE("total_loss routes targets to the right terms") {
  const int k = 5;
  Rng rng(37);
  // one free-space target with two supports
  std::vector<double> z(2 * k);
  for (auto& v : z) v = rng.uniform(-1.0, 1.0);
  std::vector<double> w{0.9, 1.1};
  BatchTarget t;
  t.kind = TargetKind::free_space;
  t.class_id = 0;
  t.offset = 0;
  t.support_count = 2;
  t.weights = w.data();

  LossWeights lw;
  LossReport r = total_loss(z.data(), k, std::vector<BatchTarget>{t}, lw,
                            nullptr, true);
  CHECK(r.semantic == 0.0);
  CHECK(r.n_semantic == 0);
  CHECK(r.n_geometric == 1);
  CHECK(r.n_consistency == 1);
  CHECK(r.geometric > 0.0);
  CHECK(std::abs(r.total() - (lw.lambda_g * r.geometric +
                              lw.lambda_c * r.consistency)) <= 1e-12);

  // lambda masking: only consistency active
  LossWeights mask{0.0, 0.0, 1.0};
  LossReport rm = total_loss(z.data(), k, std::vector<BatchTarget>{t}, mask,
                             nullptr, true);
  CHECK(rm.total() == doctest::Approx(rm.consistency).epsilon(1e-12));
}

TEST_CASE("total_loss gradient matches finite differences across terms") {
  const int k = 6;
  Rng rng(41);
  std::vector<double> z(6 * k);
  for (auto& v : z) v = rng.uniform(-2.0, 2.0);
  std::vector<double> w{0.6, 0.8, 0.4, 0.2, 1.3, 0.7};
  std::vector<BatchTarget> ts(3);
  ts[0] = {TargetKind::semantic, 2, 0, 2, w.data()};
  ts[1] = {TargetKind::free_space, 0, 2, 2, w.data() + 2};
  ts[2] = {TargetKind::consistency, 0, 4, 2, w.data() + 4};
  LossWeights lw{1.7, 0.9, 1.1};

  std::vector<double> dz(z.size(), 0.0);
  total_loss(z.data(), k, ts, lw, dz.data(), true);
  auto objective = [&] {
    return total_loss(z.data(), k, ts, lw, nullptr, true).mean_objective();
  };
  for (size_t i = 0; i < z.size(); ++i) {
    double fd = testutil::numeric_grad(objective, &z[i]);
    CHECK(testutil::rel_err(dz[i], fd) < 1e-6);
  }
}
