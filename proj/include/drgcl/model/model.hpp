// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "drgcl/model/gin_encoder.hpp"
#include "drgcl/model/projection_head.hpp"

namespace drgcl {

// Encoder f_theta plus the two independently parameterized heads:
// g^DRIN (contrastive) and g^RR (redundancy reduction).
struct Model {
  EncoderConfig encoder_config;
  HeadConfig head_config;
  ParamSet encoder;
  ParamSet drin_head;
  ParamSet rr_head;

  std::size_t embedding_dim() const { return encoder_config.output_dim(); }
};

Model init_model(const EncoderConfig& encoder, std::size_t head_hidden, std::size_t head_output,
                 Rng& rng);

}  // namespace drgcl
