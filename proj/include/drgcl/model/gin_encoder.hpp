// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "drgcl/graph/batch.hpp"
#include "drgcl/model/params.hpp"

namespace drgcl {

struct EncoderConfig {
  std::size_t input_dim = 0;
  std::size_t hidden = 32;
  std::size_t layers = 3;

  // Width of the graph embedding: readouts of all layers concatenated.
  std::size_t output_dim() const { return hidden * layers; }
};

// Per layer k: w1 (in x hidden), b1 (1 x hidden), w2 (hidden x hidden),
// b2 (1 x hidden); named "encoder.layer<k>.{w1,b1,w2,b2}". Biases start at 0.
ParamSet init_encoder(const EncoderConfig& config, Rng& rng);

EncoderConfig infer_encoder_config(const ParamSet& params);

// GIN-0 forward pass. Each layer computes
//   h_v <- MLP_k(h_v + sum_{u in N(v)} h_u),  MLP_k(x) = relu(x W1 + b1) W2 + b2,
// sums node rows per graph, and the per-layer readouts are concatenated into
// a num_graphs x (layers * hidden) embedding. `params` are bound in
// init_encoder order and may be arbitrary Vars (e.g. trial weights).
Var encode(const Batch& batch, std::span<const Var> params, const EncoderConfig& config);

}  // namespace drgcl
