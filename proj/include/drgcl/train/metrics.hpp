// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace drgcl {

// One JSON-lines record of the pre-training log, written per epoch.
struct EpochRecord {
  std::size_t epoch = 0;
  double loss_drin = 0;
  double loss_rr_inv = 0;
  double loss_rr_dec = 0;
  double loss_combined = 0;
  double r_min = 0, r_mean = 0, r_max = 0;
  double r_at_zero = 0, r_at_one = 0;
  double wall_seconds = 0;
};

std::string to_json_line(const EpochRecord& r);
EpochRecord parse_json_line(const std::string& line);

}  // namespace drgcl
