// SPDX-License-Identifier: Apache-2.0
#include "drgcl/model/projection_head.hpp"

#include "drgcl/autodiff/ops.hpp"
#include "drgcl/util/error.hpp"

namespace drgcl {

ParamSet init_head(const HeadConfig& config, const std::string& prefix, Rng& rng) {
  ParamSet p;
  p.add(prefix + ".w1", glorot_uniform(config.input_dim, config.hidden, rng));
  p.add(prefix + ".b1", Tensor::zeros(1, config.hidden));
  p.add(prefix + ".w2", glorot_uniform(config.hidden, config.output, rng));
  p.add(prefix + ".b2", Tensor::zeros(1, config.output));
  return p;
}

HeadConfig infer_head_config(const ParamSet& params) {
  if (params.size() != 4) throw ShapeError("projection head needs exactly four parameters");
  return {params[0].value.rows(), params[0].value.cols(), params[2].value.cols()};
}

Var project(Var h, std::span<const Var> params) {
  if (params.size() != 4) throw ShapeError("project: expected four parameters");
  if (h.cols() != params[0].rows())
    throw ShapeError("project: input width " + std::to_string(h.cols()) + " != head input " +
                     std::to_string(params[0].rows()));
  Var hidden = ops::relu(ops::add(ops::matmul(h, params[0]), params[1]));
  return ops::add(ops::matmul(hidden, params[2]), params[3]);
}

}  // namespace drgcl
