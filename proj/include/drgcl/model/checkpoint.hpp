// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "drgcl/model/model.hpp"

namespace drgcl {

// Parameter file layout:
//   drgcl-params 1
//   tensors <count>
//   <name> <rows> <cols>          (one line per tensor)
//   payload <bytes>
//   <raw little-endian float64 values, tensors in header order>
void save_params(const std::filesystem::path& file, const ParamSet& params);
ParamSet load_params(const std::filesystem::path& file);

// All three components in one file, names prefixed "encoder.", "drin.", "rr.".
void save_model(const std::filesystem::path& file, const Model& model);
Model load_model(const std::filesystem::path& file);

}  // namespace drgcl
