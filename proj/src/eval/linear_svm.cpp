// SPDX-License-Identifier: Apache-2.0
#include "drgcl/eval/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "drgcl/kernels/kernels.hpp"
#include "drgcl/util/error.hpp"
#include "drgcl/util/rng.hpp"

namespace drgcl {

double BinarySvm::decision(std::span<const double> x) const {
  return kernels::active().dot(weights.size(), weights.data(), x.data()) + bias;
}

BinarySvm train_binary_svm(const Tensor& x, std::span<const int> y, const SvmOptions& options) {
  const std::size_t n = x.rows(), d = x.cols();
  if (y.size() != n) throw ShapeError("train_binary_svm: label count != row count");
  if (!(options.c > 0.0)) throw DomainError("train_binary_svm: C must be positive");
  const auto& k = kernels::active();

  // Rows augmented with a trailing 1 for the bias.
  const std::size_t da = d + 1;
  std::vector<double> xa(n * da);
  std::vector<double> qdiag(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(x.raw() + i * d, d, xa.data() + i * da);
    xa[i * da + d] = 1.0;
    qdiag[i] = k.dot(da, xa.data() + i * da, xa.data() + i * da);
  }

  std::vector<double> w(da, 0.0), alpha(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  const double c = options.c;

  // Coordinates stuck at a bound with a gradient pushing further out are
  // shrunk from the active set; convergence is confirmed on the full set.
  const double inf = std::numeric_limits<double>::infinity();
  double pg_max_old = inf, pg_min_old = -inf;
  std::size_t active = n;
  BinarySvm model;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    shuffle_range(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(active), rng);
    double pg_max = -inf, pg_min = inf;
    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = order[s];
      const double* xi = xa.data() + i * da;
      const double yi = y[i];
      const double g = yi * k.dot(da, w.data(), xi) - 1.0;
      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          std::swap(order[s--], order[--active]);
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == c) {
        if (g < pg_min_old) {
          std::swap(order[s--], order[--active]);
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg != 0.0) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / qdiag[i], 0.0, c);
        const double delta = (alpha[i] - old) * yi;
        if (delta != 0.0) k.axpy(da, delta, xi, w.data());
      }
    }
    model.iterations = iter + 1;
    if (active == 0 || pg_max - pg_min <= options.tolerance) {
      if (active == n) {
        model.converged = true;
        break;
      }
      active = n;
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? inf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -inf : pg_min;
  }
  if (n == 0) model.converged = true;
  model.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  model.bias = w[d];
  return model;
}

Standardizer Standardizer::fit(const Tensor& x) {
  const std::size_t n = x.rows(), d = x.cols();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.inv_scale.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += x(i, j);
  for (double& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x(i, j) - s.mean[j]) * (x(i, j) - s.mean[j]);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    s.inv_scale[j] = sd > 1e-12 * (1.0 + std::abs(s.mean[j])) ? 1.0 / sd : 1.0;
  }
  return s;
}

Tensor Standardizer::apply(const Tensor& x) const {
  if (x.cols() != mean.size()) throw ShapeError("Standardizer: width mismatch");
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - mean[j]) * inv_scale[j];
  return out;
}

void LinearClassifier::fit(const Tensor& x, std::span<const std::size_t> labels,
                           const SvmOptions& options) {
  const std::set<std::size_t> present(labels.begin(), labels.end());
  classes_.assign(present.begin(), present.end());
  scorers_.clear();
  if (classes_.size() < 2) return;
  if (classes_.size() == 2) {
    // The second one-vs-rest problem is the first with y negated, whose
    // solution is exactly the negated scorer.
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == classes_[0] ? 1 : -1;
    BinarySvm first = train_binary_svm(x, y, options);
    BinarySvm second = first;
    for (double& w : second.weights) w = -w;
    second.bias = -second.bias;
    scorers_ = {std::move(first), std::move(second)};
    return;
  }
  for (std::size_t cls : classes_) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == cls ? 1 : -1;
    scorers_.push_back(train_binary_svm(x, y, options));
  }
}

std::vector<std::size_t> LinearClassifier::predict(const Tensor& x) const {
  if (classes_.empty()) throw DomainError("LinearClassifier: not fitted");
  std::vector<std::size_t> out(x.rows(), classes_.front());
  if (classes_.size() < 2) return out;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::span<const double> row(x.raw() + i * x.cols(), x.cols());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      const double s = scorers_[c].decision(row);
      if (s > best) {
        best = s;
        out[i] = classes_[c];
      }
    }
  }
  return out;
}

}  // namespace drgcl
