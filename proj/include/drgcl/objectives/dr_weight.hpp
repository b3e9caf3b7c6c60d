// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "drgcl/autodiff/tensor.hpp"

namespace drgcl {

// Learnable per-dimension rationale weight. Stores raw values; the effective
// weight is raw clamped to [0, 1]. Updates re-clamp the raw values, so a
// coordinate pinned at a bound stays there until the gradient turns around.
class DRWeight {
 public:
  DRWeight() = default;
  explicit DRWeight(std::size_t dim, double init = 1.0) : raw_(dim, init) {}
  explicit DRWeight(std::vector<double> raw) : raw_(std::move(raw)) {}

  std::size_t size() const { return raw_.size(); }
  const std::vector<double>& raw() const { return raw_; }
  double effective(std::size_t k) const;
  // 1 x D row of effective weights.
  Tensor effective_row() const;

  // raw <- clamp(raw - rate * grad, 0, 1)
  void descend(std::span<const double> grad, double rate);
  void clamp();

  struct Stats {
    double min = 0, mean = 0, max = 0;
    double at_zero = 0, at_one = 0;  // fractions of coordinates on each bound
  };
  Stats stats() const;

 private:
  std::vector<double> raw_;
};

// Plain text, one raw value per line ("%.17g").
void save_dr_weight(const std::filesystem::path& file, const DRWeight& r);
DRWeight load_dr_weight(const std::filesystem::path& file);

}  // namespace drgcl
