// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "drgcl/graph/batch.hpp"
#include "drgcl/model/model.hpp"
#include "drgcl/objectives/dr_weight.hpp"
#include "drgcl/objectives/losses.hpp"
#include "drgcl/train/adam.hpp"
#include "drgcl/train/config.hpp"
#include "drgcl/train/metrics.hpp"
#include "drgcl/util/error.hpp"

namespace drgcl {

// Raised when any loss, gradient or parameter turns non-finite. The message
// names the phase and the offending term.
struct TrainingAborted : Error {
  using Error::Error;
};

struct TrainState {
  Model model;
  DRWeight r;
  Adam optimizer;
  std::size_t epoch = 0;
  std::size_t step = 0;
  std::vector<EpochRecord> history;
};

// The two augmented views of one minibatch, collated.
struct ViewBatch {
  Batch view_i;
  Batch view_j;
};

LossSettings loss_settings(const RunConfig& config);

// Fresh model (init stream of config.seed) with R at 1, or at fixed_R.
TrainState init_state(std::size_t input_dim, const RunConfig& config);

// Draws two views per listed graph from the augment stream and collates them.
ViewBatch sample_views(const Dataset& dataset, std::span<const std::size_t> members,
                       double ratio, Rng& rng);

// One optimizer update of (theta, vartheta, vartheta') on L_RR + alpha L_DRIN
// with R held fixed.
LossTerms regular_step(TrainState& state, const ViewBatch& views, const RunConfig& config);

// theta_trial = theta - beta grad_theta L_DRIN and likewise for the DRIN head,
// recorded on a tape that stays alive inside the returned object so the meta
// step can differentiate through it. The RR head is not involved.
struct TrialWeights {
  std::unique_ptr<Tape> tape;
  std::vector<Var> encoder_params;  // theta leaves
  std::vector<Var> head_params;     // vartheta leaves
  std::vector<Var> encoder_trial;
  std::vector<Var> head_trial;
  Var omega;
  double inner_loss = 0;
  const ViewBatch* views = nullptr;  // batch the trial step was taken on
};

TrialWeights trial_weights(const TrainState& state, const ViewBatch& views,
                           const RunConfig& config);

struct MetaResult {
  double meta_loss = 0;  // L_DRIN at the trial weights, before the R update
  std::vector<double> gradient;
};

// R_raw <- clamp(R_raw - meta_lr * dL_DRIN(trial)/dR, 0, 1), with the total
// derivative taken through the trial weights. Consumes `trial`.
MetaResult meta_step(TrainState& state, TrialWeights& trial, const ViewBatch& views,
                     const RunConfig& config);

enum class Phase { Regular, Trial, Meta };

struct PretrainOptions {
  // Receives the phase sequence of every batch.
  std::function<void(Phase)> observer;
  // When set: metrics.jsonl is appended per epoch, and params.bin / r.txt are
  // written at the end (or on abort, as partial checkpoints).
  std::optional<std::filesystem::path> out_dir;
};

TrainState pretrain(const Dataset& dataset, const RunConfig& config,
                    const PretrainOptions& options = {});

}  // namespace drgcl
