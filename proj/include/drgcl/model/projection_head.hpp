// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>

#include "drgcl/model/params.hpp"

namespace drgcl {

struct HeadConfig {
  std::size_t input_dim = 96;
  std::size_t hidden = 512;
  std::size_t output = 512;
};

// Affine -> ReLU -> affine. Parameters "<prefix>.w1", "<prefix>.b1",
// "<prefix>.w2", "<prefix>.b2".
ParamSet init_head(const HeadConfig& config, const std::string& prefix, Rng& rng);
HeadConfig infer_head_config(const ParamSet& params);

Var project(Var h, std::span<const Var> params);

}  // namespace drgcl
