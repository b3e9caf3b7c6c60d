#include <doctest.h>

#include <cmath>

#include "drgcl/autodiff/ops.hpp"
#include "drgcl/util/error.hpp"
#include "support/support.hpp"

using namespace drgcl;
using namespace drgcl::ops;
using drgcl::testing::gradient_check;
using drgcl::testing::random_tensor;

TEST_CASE("forward examples") {
  Tape t;
  const Var a = t.leaf(Tensor::matrix({{1, 2}, {3, 4}}));
  CHECK(matmul(a, t.constant(Tensor::identity(2))).value() == a.value());
  CHECK(relu(t.leaf(Tensor::row({-1, 0, 2.5}))).value() == Tensor::row({0, 0, 2.5}));
  const Var rows = t.leaf(Tensor::matrix({{1, 1}, {2, 2}, {3, 3}}));
  CHECK(rowsum_by_segment(rows, make_index({0, 0, 1}), 2).value() ==
        Tensor::matrix({{3, 3}, {3, 3}}));
}

TEST_CASE("rowsum_by_segment matches per-segment summation") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t r = 1 + uniform_index(rng, 12), c = 1 + uniform_index(rng, 4),
                      segs = 1 + uniform_index(rng, 5);
    std::vector<std::size_t> seg(r);
    for (auto& s : seg) s = uniform_index(rng, segs);
    Tape t;
    const Tensor x = random_tensor(rng, r, c);
    const Tensor out = rowsum_by_segment(t.leaf(x), make_index(seg), segs).value();
    Tensor expect({segs, c});
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t k = 0; k < c; ++k) expect(seg[i], k) += x(i, k);
    CHECK(max_abs_diff(out, expect) <= 1e-15);
  }
}

TEST_CASE("backward examples") {
  Tape t;
  const Var x = t.leaf(Tensor::row({1, 2, 3}));
  const Var w[] = {x};
  CHECK(backward(t, sum(mul(x, x)), w)[0] == Tensor::row({2, 4, 6}));

  const Var c = t.leaf(Tensor::scalar(5.0));
  CHECK(backward(t, c, w)[0] == Tensor::zeros(1, 3));
  CHECK(backward(t, sum(t.constant(Tensor::ones(2, 2))), w)[0] == Tensor::zeros(1, 3));
}

TEST_CASE("backward errors") {
  Tape t, other;
  const Var x = t.leaf(Tensor::row({1, 2}));
  const Var w[] = {x};
  CHECK_THROWS_AS(backward(t, mul(x, x), w), ShapeError);
  const Var stranger[] = {other.leaf(Tensor::scalar(1))};
  CHECK_THROWS_AS(backward(t, sum(x), stranger), DomainError);
}

TEST_CASE("shape and domain errors") {
  Tape t;
  const Var a = t.leaf(Tensor::zeros(2, 3));
  CHECK_THROWS_AS(add(a, t.leaf(Tensor::zeros(3, 2))), ShapeError);
  CHECK_THROWS_AS(matmul(a, a), ShapeError);
  CHECK_THROWS_AS(slice_cols(a, 2, 5), ShapeError);
  CHECK_THROWS_AS(div(t.leaf(Tensor::row({1})), t.leaf(Tensor::row({0}))), DomainError);
  CHECK_THROWS_AS(ops::exp(t.leaf(Tensor::row({1000}))), NumericError);
  CHECK_THROWS_AS(t.leaf(Tensor::row({std::nan("")})), NumericError);
  // The guard keeps log and sqrt finite at zero.
  CHECK(std::isfinite(ops::log(t.leaf(Tensor::row({0}))).value().item()));
  CHECK(ops::sqrt(t.leaf(Tensor::row({0}))).value().item() == doctest::Approx(1e-6));
}

TEST_CASE("stale vars are rejected") {
  Tape t;
  const Var x = t.leaf(Tensor::scalar(2));
  const std::size_t mark = t.size();
  const Var y = mul(x, x);
  t.truncate(mark);
  CHECK_THROWS_AS((void)y.value(), DomainError);
}

TEST_CASE("three-layer MLP gradient matches central differences") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Tensor> inputs{random_tensor(rng, 4, 3), random_tensor(rng, 3, 5),
                               random_tensor(rng, 1, 5), random_tensor(rng, 5, 4),
                               random_tensor(rng, 4, 2)};
    testing::Builder f = [](Tape&, const std::vector<Var>& v) {
      Var h = ops::exp(scale(matmul(v[0], v[1]), 0.5)) + v[2];
      h = relu(matmul(h, v[3]));
      return sum(power(shift(matmul(h, v[4]), 3.0), 2.0));
    };
    CHECK(gradient_check(f, inputs) <= 1e-5);
  }
}

TEST_CASE("every op passes finite differences") {
  for (const auto& r : testing::run_op_suite(20, 1e-5, 5)) {
    CAPTURE(r.op);
    CAPTURE(r.worst);
    CHECK(r.failures == 0);
  }
}

namespace {

// theta' = theta - beta * d/dtheta (theta w)^2 / 2; meta = (theta' w)^2 / 2.
double closed_form(double theta, double w, double beta) {
  return (theta * w - beta * theta * w * w * w) * (theta - 3.0 * beta * theta * w * w);
}

double through_tape(double theta0, double w0, double beta) {
  Tape t;
  const Var theta = t.leaf(Tensor::scalar(theta0));
  const Var w = t.leaf(Tensor::scalar(w0));
  const Var inner = scale(power(mul(theta, w), 2.0), 0.5);
  const Var wrt[] = {theta};
  const Var g = t.gradient_graph(inner, wrt)[0];
  const Var trial = sub(theta, scale(g, beta));
  const Var meta = scale(power(mul(trial, w), 2.0), 0.5);
  return grad_through_grad(t, meta, w).item();
}

}  // namespace

TEST_CASE("grad_through_grad closed forms") {
  CHECK(through_tape(1.0, 1.0, 0.1) == doctest::Approx(0.63).epsilon(1e-14));
  CHECK(through_tape(2.0, 0.5, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    const double th = uniform_real(rng, -2, 2), w = uniform_real(rng, -2, 2),
                 b = uniform_real(rng, 0, 0.5);
    CHECK(std::abs(through_tape(th, w, b) - closed_form(th, w, b)) <=
          1e-10 * std::max(1.0, std::abs(closed_form(th, w, b))));
  }
}

TEST_CASE("grad_through_grad requires a retained gradient path") {
  Tape t;
  const Var w = t.leaf(Tensor::scalar(1.5));
  CHECK_THROWS_AS(grad_through_grad(t, mul(w, w), w), DomainError);
}

TEST_CASE("first-order gradients leave the tape as they found it") {
  Tape t;
  const Var x = t.leaf(Tensor::row({1, 2}));
  const Var y = sum(mul(x, x));
  const std::size_t before = t.size();
  const Var w[] = {x};
  (void)t.gradient(y, w);
  CHECK(t.size() == before);
}

TEST_CASE("replay reproduces every node bit for bit") {
  Rng rng(4);
  Tape t;
  const Var a = t.leaf(random_tensor(rng, 3, 4));
  const Var b = t.leaf(random_tensor(rng, 4, 2));
  const Var out = sum(ops::log(shift(ops::exp(matmul(a, b)), 1.0)));
  const Var w[] = {a, b};
  (void)t.gradient_graph(out, w);
  const auto replayed = t.replay();
  REQUIRE(replayed.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(replayed[i] == t.node_at(i).value);
}
