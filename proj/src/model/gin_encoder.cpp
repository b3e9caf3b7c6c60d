// SPDX-License-Identifier: Apache-2.0
#include "drgcl/model/gin_encoder.hpp"

#include "drgcl/autodiff/ops.hpp"
#include "drgcl/util/error.hpp"

namespace drgcl {

ParamSet init_encoder(const EncoderConfig& config, Rng& rng) {
  if (config.input_dim == 0 || config.hidden == 0 || config.layers == 0)
    throw ConfigError("encoder widths must be positive");
  ParamSet p;
  std::size_t in = config.input_dim;
  for (std::size_t k = 0; k < config.layers; ++k) {
    const std::string prefix = "encoder.layer" + std::to_string(k) + ".";
    p.add(prefix + "w1", glorot_uniform(in, config.hidden, rng));
    p.add(prefix + "b1", Tensor::zeros(1, config.hidden));
    p.add(prefix + "w2", glorot_uniform(config.hidden, config.hidden, rng));
    p.add(prefix + "b2", Tensor::zeros(1, config.hidden));
    in = config.hidden;
  }
  return p;
}

EncoderConfig infer_encoder_config(const ParamSet& params) {
  if (params.size() == 0 || params.size() % 4 != 0)
    throw ShapeError("encoder parameters must come in groups of four per layer");
  EncoderConfig c;
  c.input_dim = params[0].value.rows();
  c.hidden = params[0].value.cols();
  c.layers = params.size() / 4;
  return c;
}

Var encode(const Batch& batch, std::span<const Var> params, const EncoderConfig& config) {
  if (params.size() != 4 * config.layers)
    throw ShapeError("encode: expected " + std::to_string(4 * config.layers) + " parameters");
  if (batch.features.cols() != config.input_dim)
    throw ShapeError("encode: node feature width " + std::to_string(batch.features.cols()) +
                     " != encoder input width " + std::to_string(config.input_dim));
  Tape& tape = *params.front().tape();
  Var h = tape.constant(batch.features);
  std::vector<Var> readouts;
  readouts.reserve(config.layers);
  for (std::size_t k = 0; k < config.layers; ++k) {
    const Var* p = params.data() + 4 * k;
    Var agg = h;
    if (!batch.edge_src->empty()) {
      Var messages = ops::gather_rows(h, batch.edge_src);
      agg = ops::add(h, ops::rowsum_by_segment(messages, batch.edge_dst, batch.num_nodes));
    }
    Var hidden = ops::relu(ops::add(ops::matmul(agg, p[0]), p[1]));
    h = ops::add(ops::matmul(hidden, p[2]), p[3]);
    readouts.push_back(ops::rowsum_by_segment(h, batch.segments, batch.num_graphs));
  }
  return readouts.size() == 1 ? readouts.front() : ops::concat_cols(readouts);
}

}  // namespace drgcl
