// SPDX-License-Identifier: Apache-2.0
#include "drgcl/train/adam.hpp"

#include <cmath>

#include "drgcl/util/error.hpp"

namespace drgcl {

void Adam::step(const std::vector<ParamSet*>& sets, const std::vector<Tensor>& grads) {
  std::size_t total = 0;
  for (const ParamSet* s : sets) total += s->size();
  if (grads.size() != total) throw ShapeError("Adam: gradient count does not match parameters");
  if (m_.empty()) {
    for (const Tensor& g : grads) {
      m_.emplace_back(g.shape());
      v_.emplace_back(g.shape());
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  std::size_t idx = 0;
  for (ParamSet* s : sets) {
    for (auto& p : *s) {
      const Tensor& g = grads[idx];
      Tensor& m = m_[idx];
      Tensor& v = v_[idx];
      if (g.shape() != p.value.shape()) throw ShapeError("Adam: gradient shape mismatch for " + p.name);
      for (std::size_t i = 0; i < g.numel(); ++i) {
        m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
        v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
        p.value[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
      }
      ++idx;
    }
  }
}

}  // namespace drgcl
