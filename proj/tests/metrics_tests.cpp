#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vflsim/data/sampling.hpp"
#include "vflsim/metrics/metrics.hpp"
#include "vflsim/rng.hpp"

using namespace vflsim;

namespace {

Schema mixed_schema() {
  Schema s;
  s.name = "m";
  Column a{"a", ColumnKind::Categorical, {"x", "y", "z"}, 0, 0};
  Column b{"b", ColumnKind::Continuous, {}, -1.0, 1.0};
  Column c{"c", ColumnKind::Categorical, {"p", "q"}, 0, 0};
  Column d{"d", ColumnKind::Continuous, {}, -1.0, 1.0};
  s.columns = {a, b, c, d};
  return s;
}

// Independent per-cell scorer used as the oracle: decodes each categorical
// group by linear scan and walks cells one by one.
AccuracyTriple brute_force_accuracy(const Matrix& recon, const Matrix& truth,
                                    const Schema& schema, double eps) {
  long dh = 0, dc = 0, ch = 0, cc = 0;
  for (Index r = 0; r < recon.rows(); ++r) {
    Index off = 0;
    for (const Column& col : schema.columns) {
      if (col.kind == ColumnKind::Categorical) {
        Index k = col.encoded_size();
        Index besta = 0, bestt = 0;
        for (Index j = 0; j < k; ++j) {
          if (recon(r, off + j) > recon(r, off + besta)) besta = j;
          if (truth(r, off + j) > truth(r, off + bestt)) bestt = j;
        }
        if (besta == bestt) ++dh;
        ++dc;
        off += k;
      } else {
        double v = recon(r, off);
        if (v > 1.0) v = 1.0;
        if (v < -1.0) v = -1.0;
        if (std::abs(v - truth(r, off)) <= eps) ++ch;
        ++cc;
        off += 1;
      }
    }
  }
  AccuracyTriple t;
  t.discrete = 100.0 * dh / std::max(1L, dc);
  t.continuous = 100.0 * ch / std::max(1L, cc);
  t.overall = 100.0 * (dh + ch) / static_cast<double>(dc + cc);
  return t;
}

}  // namespace

TEST_CASE("perfect reconstruction scores 100 everywhere") {
  Schema s = mixed_schema();
  EncodedDataset d = generate_fake(s, 50, RngStream(1));
  AccuracyTriple t = reconstruction_accuracy(d.features, d.features, s);
  CHECK(t.overall == doctest::Approx(100.0));
  CHECK(t.discrete == doctest::Approx(100.0));
  CHECK(t.continuous == doctest::Approx(100.0));
}

TEST_CASE("epsilon band decides continuous hits") {
  Schema s;
  s.name = "c";
  s.columns = {Column{"x", ColumnKind::Continuous, {}, -1.0, 1.0}};
  Matrix truth(3, 1), recon(3, 1);
  truth << 0.0, 0.0, 0.0;
  recon << 0.2, 0.200001, -0.19;
  AccuracyTriple t = reconstruction_accuracy(recon, truth, s);
  CHECK(t.continuous == doctest::Approx(100.0 * 2.0 / 3.0));
  MetricConfig strict;
  strict.epsilon = 0.1;
  AccuracyTriple t2 = reconstruction_accuracy(recon, truth, s, strict);
  CHECK(t2.continuous == doctest::Approx(0.0));
}

TEST_CASE("out-of-range reconstructions are clamped before the band test") {
  Schema s;
  s.name = "c";
  s.columns = {Column{"x", ColumnKind::Continuous, {}, -1.0, 1.0}};
  Matrix truth(1, 1), recon(1, 1);
  truth << 0.95;
  recon << 37.0;  // clamps to 1.0, within 0.2 of 0.95
  AccuracyTriple t = reconstruction_accuracy(recon, truth, s);
  CHECK(t.overall == doctest::Approx(100.0));
}

TEST_CASE("categorical cells compare by argmax with raw network outputs") {
  Schema s;
  s.name = "k";
  s.columns = {Column{"a", ColumnKind::Categorical, {"u", "v", "w"}, 0, 0}};
  Matrix truth(2, 3), recon(2, 3);
  truth << 0, 1, 0,
           1, 0, 0;
  recon << -0.3, 0.9, 0.8,   // argmax 1 == truth
            0.2, 0.4, 0.1;   // argmax 1 != truth 0
  AccuracyTriple t = reconstruction_accuracy(recon, truth, s);
  CHECK(t.discrete == doctest::Approx(50.0));
  CHECK(std::isnan(t.continuous));
  CHECK(t.overall == doctest::Approx(50.0));
}

TEST_CASE("accuracy agrees exactly with a brute-force scorer on 1000 random pairs") {
  Schema s = mixed_schema();
  RngStream rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    Index n = 100;
    EncodedDataset truth = generate_fake(s, n, rng.split(static_cast<std::uint64_t>(trial)));
    Matrix recon = random_normal(rng, n, s.encoded_width(), 0.0, 1.0);
    AccuracyTriple fast = reconstruction_accuracy(recon, truth.features, s);
    AccuracyTriple slow = brute_force_accuracy(recon, truth.features, s, 0.2);
    CHECK(fast.overall == slow.overall);
    CHECK(fast.discrete == slow.discrete);
    CHECK(fast.continuous == slow.continuous);
  }
}

TEST_CASE("accuracy rejects malformed inputs") {
  Schema s = mixed_schema();
  CHECK_THROWS_AS((void)reconstruction_accuracy(Matrix::Zero(2, 3), Matrix::Zero(2, 3), s),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)reconstruction_accuracy(Matrix::Zero(2, 7), Matrix::Zero(3, 7), s),
      std::invalid_argument);
  CHECK_THROWS_AS((void)reconstruction_accuracy(Matrix(0, 7), Matrix(0, 7), s),
                  std::invalid_argument);
}

TEST_CASE("psnr closed forms") {
  Matrix a = Matrix::Zero(4, 4);
  Matrix b = Matrix::Constant(4, 4, 0.5);
  // mse = 0.25, range 2 -> 10 log10(16)
  CHECK(psnr(b, a) == doctest::Approx(10.0 * std::log10(16.0)));
  CHECK(std::isinf(psnr(a, a)));
  // range 1 differs by 20 log10(2)
  CHECK(psnr(b, a, 1.0) == doctest::Approx(10.0 * std::log10(16.0) - 20.0 * std::log10(2.0)));
}

TEST_CASE("psnr falls as noise grows") {
  RngStream rng(4);
  Matrix img = random_uniform(rng, 16, 16, -1.0, 1.0);
  Matrix n1 = img + random_normal(rng, 16, 16, 0.0, 0.05);
  Matrix n2 = img + random_normal(rng, 16, 16, 0.0, 0.3);
  CHECK(psnr(n1, img) > psnr(n2, img));
}

TEST_CASE("ssim is 1 on identical images and symmetric") {
  RngStream rng(5);
  Matrix img = random_uniform(rng, 16, 16, -1.0, 1.0);
  CHECK(ssim_image(img, img) == doctest::Approx(1.0));
  Matrix noisy = img + random_normal(rng, 16, 16, 0.0, 0.2);
  CHECK(ssim_image(img, noisy) == doctest::Approx(ssim_image(noisy, img)));
  double s = ssim_image(img, noisy);
  CHECK(s > -1.0);
  CHECK(s < 1.0);
}

TEST_CASE("ssim global window matches the closed form for constant images") {
  Matrix a = Matrix::Zero(8, 8);  // < 16x16 -> single global window
  Matrix b = Matrix::Constant(8, 8, 0.5);
  double c1 = 0.0004;  // (0.01*2)^2
  double expected = c1 / (0.25 + c1);  // variances zero, cov zero
  CHECK(ssim_image(a, b) == doctest::Approx(expected));
}

TEST_CASE("ssim decreases as structure is destroyed") {
  RngStream rng(6);
  // structured image: vertical gradient
  Matrix img(16, 16);
  for (Index i = 0; i < 16; ++i)
    for (Index j = 0; j < 16; ++j) img(i, j) = -1.0 + 2.0 * static_cast<double>(i) / 15.0;
  Matrix mild = img + random_normal(rng, 16, 16, 0.0, 0.1);
  Matrix wrecked = random_uniform(rng, 16, 16, -1.0, 1.0);
  CHECK(ssim_image(img, mild) > ssim_image(img, wrecked));
}

TEST_CASE("mean_ssim averages per-row images") {
  RngStream rng(7);
  Matrix rows(2, 64);
  rows.row(0) = random_uniform(rng, 1, 64, -1.0, 1.0);
  rows.row(1) = random_uniform(rng, 1, 64, -1.0, 1.0);
  double m = mean_ssim(rows, rows, 8, 8);
  CHECK(m == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)mean_ssim(rows, rows, 8, 9), std::invalid_argument);
}

TEST_CASE("roc_auc nails the textbook cases") {
  // perfect separation
  CHECK(roc_auc({0, 0, 1, 1}, Vector{{0.1, 0.2, 0.8, 0.9}}) == doctest::Approx(1.0));
  // perfectly wrong
  CHECK(roc_auc({1, 1, 0, 0}, Vector{{0.1, 0.2, 0.8, 0.9}}) == doctest::Approx(0.0));
  // all scores tied -> 0.5
  CHECK(roc_auc({0, 1, 0, 1}, Vector{{0.5, 0.5, 0.5, 0.5}}) == doctest::Approx(0.5));
  // hand-counted mix: pairs (pos, neg) won = 5 of 6
  CHECK(roc_auc({0, 1, 0, 1, 1}, Vector{{0.4, 0.3, 0.2, 0.6, 0.9}}) ==
        doctest::Approx(5.0 / 6.0));
  CHECK_THROWS_AS((void)roc_auc({1, 1}, Vector{{0.1, 0.2}}), std::invalid_argument);
  CHECK_THROWS_AS((void)roc_auc({0, 1}, Vector{{0.1}}), std::invalid_argument);
}

TEST_CASE("roc_auc equals the pairwise rank oracle within 1e-12") {
  RngStream rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    std::size_t n = 200;
    std::vector<int> labels(n);
    Vector scores(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(rng.below(2));
      // quantized scores to force plenty of ties
      scores(static_cast<Index>(i)) = std::round(rng.uniform() * 20.0) / 20.0;
    }
    double wins = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != 1) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] != 0) continue;
        double si = scores(static_cast<Index>(i)), sj = scores(static_cast<Index>(j));
        wins += si > sj ? 1.0 : (si == sj ? 0.5 : 0.0);
        ++pairs;
      }
    }
    double oracle = wins / static_cast<double>(pairs);
    CHECK(std::abs(roc_auc(labels, scores) - oracle) < 1e-12);
  }
}

TEST_CASE("roc_auc ignores monotone score transforms") {
  RngStream rng(9);
  std::vector<int> labels;
  Vector raw(100);
  for (Index i = 0; i < 100; ++i) {
    labels.push_back(static_cast<int>(rng.below(2)));
    raw(i) = rng.normal();
  }
  Vector squashed = (1.0 / (1.0 + (-raw.array()).exp())).matrix();
  CHECK(roc_auc(labels, raw) == doctest::Approx(roc_auc(labels, squashed)).epsilon(1e-12));
}

TEST_CASE("classification accuracy handles both output layouts") {
  Matrix p(4, 1);
  p << 0.9, 0.2, 0.5, 0.49;
  CHECK(classification_accuracy({1, 0, 1, 0}, p) == doctest::Approx(1.0));
  CHECK(classification_accuracy({0, 1, 0, 1}, p) == doctest::Approx(0.0));

  Matrix q(3, 3);
  q << 0.7, 0.2, 0.1,
       0.1, 0.8, 0.1,
       0.3, 0.3, 0.4;
  CHECK(classification_accuracy({0, 1, 2}, q) == doctest::Approx(1.0));
  CHECK(classification_accuracy({0, 1, 0}, q) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS((void)classification_accuracy({0, 1}, q), std::invalid_argument);
}
