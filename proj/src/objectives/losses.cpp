// SPDX-License-Identifier: Apache-2.0
#include "drgcl/objectives/losses.hpp"

#include <cmath>

#include "drgcl/autodiff/ops.hpp"
#include "drgcl/util/error.hpp"

namespace drgcl {

using namespace ops;

Var apply_dr(Var h, Var omega) {
  if (omega.rows() != 1 || omega.cols() != h.cols())
    throw ShapeError("apply_dr: weight " + shape_str(omega.shape()) + " for embeddings " +
                     shape_str(h.shape()));
  return mul(h, omega);
}

Var normalize_rows(Var z) {
  Var norms = ops::sqrt(sum_cols(mul(z, z)));  // N x 1
  return transpose(div(transpose(z), transpose(norms)));
}

Var infonce(Var zi, Var zj, double tau, bool include_positive) {
  if (zi.shape() != zj.shape()) throw ShapeError("infonce: view shapes differ");
  const std::size_t n = zi.rows();
  if (n < 2) throw ShapeError("infonce: need at least two pairs for a negative");
  if (!(tau > 0.0)) throw DomainError("infonce: temperature must be positive");
  Tape& tape = *zi.tape();
  Var sim = scale(matmul(normalize_rows(zi), transpose(normalize_rows(zj))), 1.0 / tau);
  Var positive = sum_cols(mul(sim, tape.constant(Tensor::identity(n))));
  Tensor mask = Tensor::ones(n, n);
  if (!include_positive)
    for (std::size_t i = 0; i < n; ++i) mask(i, i) = 0.0;
  Var denom = sum_cols(mul(ops::exp(sim), tape.constant(std::move(mask))));
  return sum(sub(ops::log(denom), positive));
}

Var normalize_instance_dim(Var z) {
  const std::size_t n = z.rows();
  if (n < 2) throw ShapeError("normalize_instance_dim: need at least two rows");
  Var centered = sub(z, mean_rows(z));
  Var sigma = ops::sqrt(mean_rows(mul(centered, centered)));
  return div_guarded(centered, scale(sigma, std::sqrt(static_cast<double>(n))));
}

RrTerms rr_loss(Var zi_bar, Var zj_bar) {
  if (zi_bar.shape() != zj_bar.shape()) throw ShapeError("rr_loss: view shapes differ");
  Tape& tape = *zi_bar.tape();
  Var diff = sub(zi_bar, zj_bar);
  Var eye = tape.constant(Tensor::identity(zi_bar.cols()));
  Var ci = sub(matmul(transpose(zi_bar), zi_bar), eye);
  Var cj = sub(matmul(transpose(zj_bar), zj_bar), eye);
  return {sum(mul(diff, diff)), add(sum(mul(ci, ci)), sum(mul(cj, cj)))};
}

LossGraph combined_loss(const Batch& view_i, const Batch& view_j, const BoundModel& bound,
                        const LossSettings& settings) {
  const EncoderConfig& ec = bound.model->encoder_config;
  LossGraph g;
  g.h_i = apply_dr(encode(view_i, bound.encoder, ec), bound.omega);
  g.h_j = apply_dr(encode(view_j, bound.encoder, ec), bound.omega);
  g.drin = infonce(project(g.h_i, bound.drin_head), project(g.h_j, bound.drin_head), settings.tau,
                   settings.inclusive_infonce);
  g.combined = scale(g.drin, settings.alpha);
  g.terms.drin = g.drin.value().item();
  if (settings.enable_rr) {
    const RrTerms rr = rr_loss(normalize_instance_dim(project(g.h_i, bound.rr_head)),
                               normalize_instance_dim(project(g.h_j, bound.rr_head)));
    g.rr_invariance = rr.invariance;
    g.rr_decorrelation = rr.decorrelation;
    g.combined = add(add(rr.invariance, scale(rr.decorrelation, settings.lambda)), g.combined);
    g.terms.rr_invariance = rr.invariance.value().item();
    g.terms.rr_decorrelation = rr.decorrelation.value().item();
  }
  g.terms.combined = g.combined.value().item();
  g.terms.tau = settings.tau;
  g.terms.lambda = settings.lambda;
  g.terms.alpha = settings.alpha;
  return g;
}

Var drin_loss(const Batch& view_i, const Batch& view_j, const EncoderConfig& encoder_config,
              std::span<const Var> encoder, std::span<const Var> drin_head, Var omega,
              const LossSettings& settings) {
  Var hi = apply_dr(encode(view_i, encoder, encoder_config), omega);
  Var hj = apply_dr(encode(view_j, encoder, encoder_config), omega);
  return infonce(project(hi, drin_head), project(hj, drin_head), settings.tau,
                 settings.inclusive_infonce);
}

}  // namespace drgcl
