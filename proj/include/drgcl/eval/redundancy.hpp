// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "drgcl/autodiff/tensor.hpp"

namespace drgcl {

struct RedundancyResult {
  Tensor correlation;  // D x D, |Pearson|, symmetric
  double mean_abs_off_diagonal = 0.0;
};

// Constant columns correlate as 0 with everything, themselves included.
RedundancyResult redundancy_matrix(const Tensor& table);

void write_matrix_csv(const std::filesystem::path& file, const Tensor& m);
// P2 graymap, pixel = round(255 * (1 - |c|)) so that similar pairs are dark.
void write_pgm(const std::filesystem::path& file, const Tensor& correlation);

}  // namespace drgcl
