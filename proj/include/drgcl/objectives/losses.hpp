// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "drgcl/graph/batch.hpp"
#include "drgcl/model/model.hpp"

namespace drgcl {

// h~ = h (.) omega, omega a 1 x D row.
Var apply_dr(Var h, Var omega);

// Rows scaled to unit Euclidean norm; squared norms are floored at 1e-12.
Var normalize_rows(Var z);

// Contrastive loss over a batch of N positive pairs (row n of zi with row n
// of zj), cosine similarity over temperature tau, summed over anchors:
//   sum_n -log( exp(s_nn / tau) / sum_{n' != n} exp(s_nn' / tau) ).
// With include_positive the denominator also runs over n' = n.
Var infonce(Var zi, Var zj, double tau, bool include_positive = false);

// Column-wise (z - mean) / (std * sqrt(N)), population std, so every
// non-constant column ends with mean 0 and unit squared norm. Constant
// columns map to zero.
Var normalize_instance_dim(Var z);

struct RrTerms {
  Var invariance;     // ||zi - zj||_F^2
  Var decorrelation;  // ||zi^T zi - I||_F^2 + ||zj^T zj - I||_F^2
};

RrTerms rr_loss(Var zi_bar, Var zj_bar);

struct LossSettings {
  double tau = 0.1;
  double lambda = 0.001;
  double alpha = 10.0;
  bool enable_rr = true;
  bool inclusive_infonce = false;
};

struct LossTerms {
  double drin = 0;
  double rr_invariance = 0;
  double rr_decorrelation = 0;
  double combined = 0;
  double tau = 0, lambda = 0, alpha = 0;
};

// Parameters of one forward pass, bound on a single tape.
struct BoundModel {
  const Model* model = nullptr;
  std::span<const Var> encoder;
  std::span<const Var> drin_head;
  std::span<const Var> rr_head;
  Var omega;  // 1 x D effective DR weight
};

struct LossGraph {
  Var h_i, h_j;  // embeddings after the DR weight
  Var drin;
  Var rr_invariance, rr_decorrelation;  // unset when RR is disabled
  Var combined;                         // rr_inv + lambda * rr_dec + alpha * drin
  LossTerms terms;
};

// encode -> apply_dr -> both heads -> both losses -> L_RR + alpha * L_DRIN.
LossGraph combined_loss(const Batch& view_i, const Batch& view_j, const BoundModel& bound,
                        const LossSettings& settings);

// L_DRIN alone (used for trial weights and the meta objective).
Var drin_loss(const Batch& view_i, const Batch& view_j, const EncoderConfig& encoder_config,
              std::span<const Var> encoder, std::span<const Var> drin_head, Var omega,
              const LossSettings& settings);

}  // namespace drgcl
