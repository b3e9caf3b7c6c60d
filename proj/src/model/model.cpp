// SPDX-License-Identifier: Apache-2.0
#include "drgcl/model/model.hpp"

namespace drgcl {

Model init_model(const EncoderConfig& encoder, std::size_t head_hidden, std::size_t head_output,
                 Rng& rng) {
  Model m;
  m.encoder_config = encoder;
  m.head_config = {encoder.output_dim(), head_hidden, head_output};
  m.encoder = init_encoder(encoder, rng);
  m.drin_head = init_head(m.head_config, "drin", rng);
  m.rr_head = init_head(m.head_config, "rr", rng);
  return m;
}

}  // namespace drgcl
