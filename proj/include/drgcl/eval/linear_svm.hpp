// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "drgcl/autodiff/tensor.hpp"

namespace drgcl {

struct SvmOptions {
  double c = 1.0;
  double tolerance = 1e-6;  // on the projected-gradient spread
  std::size_t max_iterations = 10000;  // passes over the data
  std::uint64_t seed = 0;              // visiting order of the coordinates
};

// min_w 0.5 |w|^2 + C sum_i max(0, 1 - y_i (w . x_i + b)), the bias folded
// into w through a constant feature. Solved by dual coordinate descent.
struct BinarySvm {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  double decision(std::span<const double> x) const;
};

// `y` holds +1 / -1.
BinarySvm train_binary_svm(const Tensor& x, std::span<const int> y, const SvmOptions& options);

// Per-column affine map to zero mean / unit population variance, fitted on
// one matrix and applied to others. Constant columns are only centered.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> inv_scale;

  static Standardizer fit(const Tensor& x);
  Tensor apply(const Tensor& x) const;
};

// One-vs-rest linear classifier. Classes absent from the training labels get
// no scorer and are never predicted.
class LinearClassifier {
 public:
  void fit(const Tensor& x, std::span<const std::size_t> labels, const SvmOptions& options);
  std::vector<std::size_t> predict(const Tensor& x) const;
  const std::vector<std::size_t>& classes() const { return classes_; }

 private:
  std::vector<std::size_t> classes_;
  std::vector<BinarySvm> scorers_;
};

}  // namespace drgcl
