// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "drgcl/autodiff/tape.hpp"
#include "drgcl/util/rng.hpp"

namespace drgcl {

struct NamedTensor {
  std::string name;
  Tensor value;
};

// Ordered, named parameter tensors of one network component.
class ParamSet {
 public:
  void add(std::string name, Tensor value);
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  NamedTensor& operator[](std::size_t i) { return items_[i]; }
  const NamedTensor& operator[](std::size_t i) const { return items_[i]; }
  auto begin() { return items_.begin(); }
  auto end() { return items_.end(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  const Tensor& at(const std::string& name) const;
  std::size_t scalar_count() const;

  // Places every tensor on `tape` as a leaf, in order.
  std::vector<Var> bind(Tape& tape, bool requires_grad = true) const;
  // Copies the values of `vars` (same order) back into this set.
  void assign(const std::vector<Var>& vars);

 private:
  std::vector<NamedTensor> items_;
};

// Weight of shape fan_in x fan_out, uniform in +-sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace drgcl
