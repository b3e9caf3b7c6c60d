// SPDX-License-Identifier: Apache-2.0
#include "drgcl/model/params.hpp"

#include <cmath>

#include "drgcl/util/error.hpp"

namespace drgcl {

void ParamSet::add(std::string name, Tensor value) {
  items_.push_back({std::move(name), std::move(value)});
}

const Tensor& ParamSet::at(const std::string& name) const {
  for (const auto& item : items_)
    if (item.name == name) return item.value;
  throw DomainError("no parameter named '" + name + "'");
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& item : items_) n += item.value.numel();
  return n;
}

std::vector<Var> ParamSet::bind(Tape& tape, bool requires_grad) const {
  std::vector<Var> vars;
  vars.reserve(items_.size());
  for (const auto& item : items_) vars.push_back(tape.leaf(item.value, requires_grad));
  return vars;
}

void ParamSet::assign(const std::vector<Var>& vars) {
  if (vars.size() != items_.size()) throw ShapeError("ParamSet::assign: count mismatch");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].shape() != items_[i].value.shape())
      throw ShapeError("ParamSet::assign: shape mismatch for " + items_[i].name);
    items_[i].value = vars[i].value();
  }
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w({fan_in, fan_out});
  for (auto& v : w.data()) v = uniform_real(rng, -bound, bound);
  return w;
}

}  // namespace drgcl
