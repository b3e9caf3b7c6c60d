// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "drgcl/model/params.hpp"

namespace drgcl {

// Adaptive-moment optimizer over a fixed list of parameter sets.
class Adam {
 public:
  explicit Adam(double lr = 0.01, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // `grads` holds one tensor per parameter, sets concatenated in order.
  void step(const std::vector<ParamSet*>& sets, const std::vector<Tensor>& grads);

  std::size_t steps() const { return t_; }
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace drgcl
