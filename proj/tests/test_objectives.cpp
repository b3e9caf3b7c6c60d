#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "drgcl/objectives/dr_weight.hpp"
#include "drgcl/util/error.hpp"
#include "support/support.hpp"

using namespace drgcl;
using namespace drgcl::ops;
using testing::random_tensor;

namespace {

double loss_value(Var v) { return v.value().item(); }

// Affine-ReLU-affine with plain loops.
Tensor brute_head(const Tensor& h, const ParamSet& p) {
  const Tensor &w1 = p[0].value, &b1 = p[1].value, &w2 = p[2].value, &b2 = p[3].value;
  Tensor mid({h.rows(), w1.cols()}), out({h.rows(), w2.cols()});
  for (std::size_t n = 0; n < h.rows(); ++n) {
    for (std::size_t j = 0; j < w1.cols(); ++j) {
      double s = b1[j];
      for (std::size_t k = 0; k < h.cols(); ++k) s += h(n, k) * w1(k, j);
      mid(n, j) = std::max(0.0, s);
    }
    for (std::size_t j = 0; j < w2.cols(); ++j) {
      double s = b2[j];
      for (std::size_t k = 0; k < w1.cols(); ++k) s += mid(n, k) * w2(k, j);
      out(n, j) = s;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("apply_dr examples") {
  Tape t;
  const Var h = t.leaf(Tensor::matrix({{2, 4}}));
  CHECK(apply_dr(h, t.constant(Tensor::row({0.5, 0.25}))).value() == Tensor::matrix({{1, 1}}));
  CHECK(apply_dr(h, t.constant(Tensor::row({1, 1}))).value() == h.value());
  CHECK(apply_dr(h, t.constant(Tensor::row({0, 0}))).value() == Tensor::zeros(1, 2));
  CHECK_THROWS_AS(apply_dr(h, t.constant(Tensor::row({1, 1, 1}))), ShapeError);
}

TEST_CASE("infonce hand-evaluated cases") {
  Tape t;
  const Var e = t.leaf(Tensor::matrix({{1, 0}, {0, 1}}));
  CHECK(loss_value(infonce(e, e, 1.0)) == doctest::Approx(-2.0).epsilon(1e-14));
  const Var same = t.leaf(Tensor::matrix({{0.3, -1}, {0.3, -1}}));
  CHECK(std::abs(loss_value(infonce(same, same, 0.1))) <= 1e-12);
  CHECK_THROWS_AS(infonce(t.leaf(Tensor::row({1, 2})), t.leaf(Tensor::row({1, 2})), 0.1),
                  ShapeError);
  CHECK_THROWS_AS(infonce(e, e, 0.0), DomainError);
}

TEST_CASE("infonce is invariant to rescaling a row") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor zi = random_tensor(rng, 5, 4), zj = random_tensor(rng, 5, 4);
    Tape t;
    const double base = loss_value(infonce(t.leaf(zi), t.leaf(zj), 0.2));
    const std::size_t row = uniform_index(rng, 5);
    const double c = uniform_real(rng, 0.1, 10.0);
    for (std::size_t k = 0; k < 4; ++k) zi(row, k) *= c;
    CHECK(std::abs(loss_value(infonce(t.leaf(zi), t.leaf(zj), 0.2)) - base) <= 1e-10);
  }
}

TEST_CASE("losses match literal double loops") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 6), p = 1 + uniform_index(rng, 6);
    const Tensor zi = random_tensor(rng, n, p, -2, 2), zj = random_tensor(rng, n, p, -2, 2);
    const double tau = uniform_real(rng, 0.1, 1.0);
    Tape t;
    const Var a = t.leaf(zi), b = t.leaf(zj);
    const double expect = testing::brute_infonce(zi, zj, tau);
    CHECK(std::abs(loss_value(infonce(a, b, tau)) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    const double inclusive = testing::brute_infonce(zi, zj, tau, true);
    CHECK(std::abs(loss_value(infonce(a, b, tau, true)) - inclusive) <=
          1e-12 * std::max(1.0, std::abs(inclusive)));

    CHECK(max_abs_diff(normalize_instance_dim(a).value(), testing::brute_normalize(zi)) <= 1e-12);

    const auto [inv, dec] = testing::brute_rr(zi, zj);
    const RrTerms rr = rr_loss(a, b);
    CHECK(std::abs(loss_value(rr.invariance) - inv) <= 1e-12 * std::max(1.0, inv));
    CHECK(std::abs(loss_value(rr.decorrelation) - dec) <= 1e-12 * std::max(1.0, dec));
  }
}

TEST_CASE("instance-dimensional normalization examples") {
  Tape t;
  // The additive 1e-12 guard in the denominator shifts values by ~1e-12.
  const Tensor out = normalize_instance_dim(t.leaf(Tensor::matrix({{1, 3}, {-1, 3}}))).value();
  CHECK(out(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-11));
  CHECK(out(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-11));
  CHECK(std::abs(out(0, 1)) <= 1e-15);
  CHECK(std::abs(out(1, 1)) <= 1e-15);

  Rng rng(3);
  const Tensor z = normalize_instance_dim(t.leaf(random_tensor(rng, 9, 5))).value();
  for (std::size_t k = 0; k < 5; ++k) {
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < 9; ++i) {
      s += z(i, k);
      s2 += z(i, k) * z(i, k);
    }
    CHECK(std::abs(s / 9) <= 1e-12);
    CHECK(std::abs(s2 - 1.0) <= 1e-9);
  }
}

TEST_CASE("rr_loss constructed instances") {
  Tape t;
  // Columns of a scaled orthonormal frame: Z^T Z = I.
  const double r = 1.0 / std::sqrt(2.0);
  const Tensor q = Tensor::matrix({{r, r}, {r, -r}});
  const RrTerms fixed = rr_loss(t.leaf(q), t.leaf(q));
  CHECK(std::abs(loss_value(fixed.invariance)) <= 1e-15);
  CHECK(std::abs(loss_value(fixed.decorrelation)) <= 1e-15);

  Rng rng(4);
  const Tensor z = random_tensor(rng, 4, 3);
  Tensor neg = z;
  for (double& v : neg.data()) v = -v;
  double norm2 = 0;
  for (double v : z.data()) norm2 += v * v;
  CHECK(loss_value(rr_loss(t.leaf(z), t.leaf(neg)).invariance) ==
        doctest::Approx(4 * norm2).epsilon(1e-13));
  CHECK(loss_value(rr_loss(t.leaf(z), t.leaf(z)).decorrelation) > 0.0);
  CHECK_THROWS_AS(rr_loss(t.leaf(z), t.leaf(Tensor::zeros(4, 2))), ShapeError);
}

TEST_CASE("combined loss equals a scripted composition") {
  Rng rng(5);
  const Dataset ds = testing::random_dataset(rng, 5, 3);
  const Batch vi = collate(std::span<const Graph>(ds.graphs.data(), 5));
  std::vector<Graph> shuffled(ds.graphs.rbegin(), ds.graphs.rend());
  const Batch vj = collate(std::span<const Graph>(shuffled));
  Model m = init_model({3, 4, 2}, 6, 5, rng);
  for (ParamSet* ps : {&m.encoder, &m.drin_head, &m.rr_head})
    for (auto& nt : *ps)
      if (nt.value.rows() == 1) nt.value = random_tensor(rng, 1, nt.value.cols(), -0.2, 0.2);
  const Tensor omega = random_tensor(rng, 1, 8, 0.1, 1.0);
  const LossSettings s{0.3, 0.01, 2.5, true, false};

  Tape t;
  const auto e = m.encoder.bind(t), d = m.drin_head.bind(t), r = m.rr_head.bind(t);
  const BoundModel bound{&m, e, d, r, t.constant(omega)};
  const LossGraph g = combined_loss(vi, vj, bound, s);

  Tensor hi = encode(vi, e, m.encoder_config).value(), hj = encode(vj, e, m.encoder_config).value();
  for (Tensor* h : {&hi, &hj})
    for (std::size_t n = 0; n < h->rows(); ++n)
      for (std::size_t k = 0; k < h->cols(); ++k) (*h)(n, k) *= omega[k];
  const double drin = testing::brute_infonce(brute_head(hi, m.drin_head), brute_head(hj, m.drin_head), s.tau);
  const auto [inv, dec] = testing::brute_rr(testing::brute_normalize(brute_head(hi, m.rr_head)),
                                            testing::brute_normalize(brute_head(hj, m.rr_head)));
  const double combined = inv + s.lambda * dec + s.alpha * drin;
  CHECK(std::abs(g.terms.drin - drin) <= 1e-10 * std::max(1.0, std::abs(drin)));
  CHECK(std::abs(g.terms.combined - combined) <= 1e-10 * std::max(1.0, std::abs(combined)));
  CHECK(g.terms.combined ==
        doctest::Approx(g.terms.rr_invariance + s.lambda * g.terms.rr_decorrelation +
                        s.alpha * g.terms.drin).epsilon(1e-14));

  LossSettings no_alpha = s;
  no_alpha.alpha = 0.0;
  const LossGraph only_rr = combined_loss(vi, vj, bound, no_alpha);
  CHECK(only_rr.terms.combined ==
        doctest::Approx(only_rr.terms.rr_invariance + s.lambda * only_rr.terms.rr_decorrelation));

  LossSettings no_rr = s;
  no_rr.enable_rr = false;
  const LossGraph only_drin = combined_loss(vi, vj, bound, no_rr);
  CHECK(only_drin.terms.combined == s.alpha * only_drin.terms.drin);
  CHECK(only_drin.terms.rr_invariance == 0.0);
}

TEST_CASE("conditional variance never grows under the DR weight") {
  Rng rng(6);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + uniform_index(rng, 10), d = 1 + uniform_index(rng, 6);
    Tensor h = random_tensor(rng, n, d, -3, 3);
    std::vector<std::size_t> y(n);
    for (auto& v : y) v = uniform_index(rng, 2);
    std::vector<double> w(d);
    for (auto& v : w) v = uniform_index(rng, 3) == 0 ? static_cast<double>(uniform_index(rng, 2)) : uniform_real(rng, 0, 1);
    Tape t;
    const Tensor hw = apply_dr(t.leaf(h), t.constant(Tensor::row(w))).value();
    for (std::size_t c = 0; c < 2; ++c) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < n; ++i)
        if (y[i] == c) rows.push_back(i);
      if (rows.empty()) continue;
      for (std::size_t k = 0; k < d; ++k) {
        const double before = testing::column_variance(h, rows, k);
        const double after = testing::column_variance(hw, rows, k);
        violations += after > before + 1e-12;
        violations += (after == before) != (before == 0.0 || w[k] == 1.0);
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("DR weight clamps, reports and round-trips") {
  DRWeight r(std::vector<double>{1.5, -0.2, 0.4});
  CHECK(r.effective(0) == 1.0);
  CHECK(r.effective(1) == 0.0);
  CHECK(r.effective(2) == 0.4);
  const std::vector<double> g{1.0, -1.0, 10.0};
  r.descend(g, 0.1);
  CHECK(r.raw() == std::vector<double>{1.0, 0.0, 0.0});
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> big(3);
    for (auto& v : big) v = uniform_real(rng, -50, 50);
    r.descend(big, 1.0);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(r.raw()[k] >= 0.0);
      CHECK(r.raw()[k] <= 1.0);
    }
  }
  const std::vector<double> nan{std::nan(""), 0, 0};
  CHECK_THROWS_AS(r.descend(nan, 0.1), NumericError);

  const DRWeight s(std::vector<double>{0.0, 0.25, 1.0, 1.0});
  const auto st = s.stats();
  CHECK(st.min == 0.0);
  CHECK(st.max == 1.0);
  CHECK(st.mean == doctest::Approx(0.5625));
  CHECK(st.at_zero == 0.25);
  CHECK(st.at_one == 0.5);

  const auto file = std::filesystem::temp_directory_path() / ("drgcl-r-" + std::to_string(::getpid()));
  const DRWeight odd(std::vector<double>{0.1, 1.0 / 3.0, 0.7});
  save_dr_weight(file, odd);
  CHECK(load_dr_weight(file).raw() == odd.raw());
  std::filesystem::remove(file);
}
