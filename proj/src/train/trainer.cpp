// SPDX-License-Identifier: Apache-2.0
#include "drgcl/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "drgcl/augment/augment.hpp"
#include "drgcl/autodiff/ops.hpp"
#include "drgcl/model/checkpoint.hpp"

namespace drgcl {
namespace {

void require_finite(const std::vector<Tensor>& grads, const char* phase) {
  for (const Tensor& g : grads)
    if (!g.all_finite()) throw TrainingAborted(std::string(phase) + ": non-finite gradient");
}

template <typename F>
auto guarded(const char* phase, F&& body) {
  try {
    return body();
  } catch (const NumericError& e) {
    throw TrainingAborted(std::string(phase) + ": " + e.what());
  }
}

}  // namespace

LossSettings loss_settings(const RunConfig& config) {
  LossSettings s;
  s.tau = config.tau;
  s.lambda = config.lambda;
  s.alpha = config.alpha;
  s.enable_rr = config.enable_rr;
  s.inclusive_infonce = config.inclusive_infonce;
  return s;
}

TrainState init_state(std::size_t input_dim, const RunConfig& config) {
  Rng rng = make_rng(config.seed, "init");
  EncoderConfig ec{input_dim, config.gin_hidden, config.gin_layers};
  TrainState s;
  s.model = init_model(ec, config.proj_hidden, config.proj_out, rng);
  s.r = DRWeight(ec.output_dim(), config.fixed_r.value_or(1.0));
  s.optimizer = Adam(config.pretrain_lr);
  return s;
}

ViewBatch sample_views(const Dataset& dataset, std::span<const std::size_t> members, double ratio,
                       Rng& rng) {
  std::vector<Graph> first, second;
  first.reserve(members.size());
  second.reserve(members.size());
  for (auto idx : members) {
    ViewPair pair = sample_pair(dataset.graphs.at(idx), ratio, rng);
    first.push_back(std::move(pair.first));
    second.push_back(std::move(pair.second));
  }
  return {collate(std::span<const Graph>(first)), collate(std::span<const Graph>(second))};
}

LossTerms regular_step(TrainState& state, const ViewBatch& views, const RunConfig& config) {
  return guarded("regular step", [&] {
    Tape tape;
    const auto enc = state.model.encoder.bind(tape);
    const auto drin = state.model.drin_head.bind(tape);
    const auto rr = state.model.rr_head.bind(tape, config.enable_rr);
    const Var omega = tape.constant(state.r.effective_row());
    const BoundModel bound{&state.model, enc, drin, rr, omega};
    const LossGraph loss = combined_loss(views.view_i, views.view_j, bound, loss_settings(config));
    if (!std::isfinite(loss.terms.combined))
      throw TrainingAborted("regular step: combined loss is not finite");

    std::vector<Var> wrt(enc);
    wrt.insert(wrt.end(), drin.begin(), drin.end());
    wrt.insert(wrt.end(), rr.begin(), rr.end());
    const auto grads = tape.gradient(loss.combined, wrt);
    require_finite(grads, "regular step");
    state.optimizer.set_lr(config.pretrain_lr);
    state.optimizer.step({&state.model.encoder, &state.model.drin_head, &state.model.rr_head},
                         grads);
    ++state.step;
    return loss.terms;
  });
}

TrialWeights trial_weights(const TrainState& state, const ViewBatch& views,
                           const RunConfig& config) {
  return guarded("trial weights", [&] {
    TrialWeights t;
    t.views = &views;
    t.tape = std::make_unique<Tape>();
    Tape& tape = *t.tape;
    t.encoder_params = state.model.encoder.bind(tape);
    t.head_params = state.model.drin_head.bind(tape);
    t.omega = tape.leaf(state.r.effective_row(), true);
    const LossSettings settings = loss_settings(config);
    const Var inner = drin_loss(views.view_i, views.view_j, state.model.encoder_config,
                                t.encoder_params, t.head_params, t.omega, settings);
    t.inner_loss = inner.value().item();

    std::vector<Var> wrt(t.encoder_params);
    wrt.insert(wrt.end(), t.head_params.begin(), t.head_params.end());
    const auto grads = tape.gradient_graph(inner, wrt);
    const double beta = config.trial_rate();
    for (std::size_t i = 0; i < wrt.size(); ++i) {
      const Var stepped = ops::sub(wrt[i], ops::scale(grads[i], beta));
      (i < t.encoder_params.size() ? t.encoder_trial : t.head_trial).push_back(stepped);
    }
    return t;
  });
}

MetaResult meta_step(TrainState& state, TrialWeights& trial, const ViewBatch& views,
                     const RunConfig& config) {
  if (!trial.tape)
    throw TrainingAborted("meta step: trial weights were not computed or already consumed");
  if (trial.views != &views)
    throw TrainingAborted("meta step: trial weights were computed on a different batch");
  return guarded("meta step", [&] {
    Tape& tape = *trial.tape;
    const LossSettings settings = loss_settings(config);
    MetaResult result;
    Tensor grad;
    if (config.first_order_meta) {
      // Comparison mode: trial weights treated as constants.
      std::vector<Var> enc, head;
      for (const Var& v : trial.encoder_trial) enc.push_back(tape.constant(v.value()));
      for (const Var& v : trial.head_trial) head.push_back(tape.constant(v.value()));
      const Var meta = drin_loss(views.view_i, views.view_j, state.model.encoder_config, enc,
                                 head, trial.omega, settings);
      result.meta_loss = meta.value().item();
      const Var w[] = {trial.omega};
      grad = tape.gradient(meta, w).front();
    } else {
      const Var meta = drin_loss(views.view_i, views.view_j, state.model.encoder_config,
                                 trial.encoder_trial, trial.head_trial, trial.omega, settings);
      result.meta_loss = meta.value().item();
      grad = grad_through_grad(tape, meta, trial.omega);
    }
    if (!grad.all_finite()) throw TrainingAborted("meta step: non-finite DR weight gradient");
    result.gradient.assign(grad.data().begin(), grad.data().end());
    state.r.descend(result.gradient, config.meta_lr);
    trial.tape.reset();
    return result;
  });
}

namespace {

void write_checkpoint(const std::filesystem::path& dir, const TrainState& state,
                      const std::string& suffix) {
  save_model(dir / ("params" + suffix + ".bin"), state.model);
  save_dr_weight(dir / ("r" + suffix + ".txt"), state.r);
}

}  // namespace

TrainState pretrain(const Dataset& dataset, const RunConfig& config,
                    const PretrainOptions& options) {
  config.validate();
  if (dataset.graphs.size() < 2) throw DataError("pretrain: dataset has fewer than 2 graphs");
  TrainState state = init_state(dataset.feature_dim, config);
  Rng shuffle_rng = make_rng(config.seed, "data-shuffle");
  Rng augment_rng = make_rng(config.seed, "augment");
  const bool meta = config.enable_dr && !config.fixed_r;
  const auto start = std::chrono::steady_clock::now();

  std::ofstream log;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    log.open(*options.out_dir / "metrics.jsonl", std::ios::trunc);
    if (!log) throw DataError("cannot write metrics log under " + options.out_dir->string());
  }
  auto notify = [&](Phase p) {
    if (options.observer) options.observer(p);
  };

  try {
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      const auto groups =
          plan_batches(dataset.graphs.size(), config.batch_size, shuffle_rng, config.shuffle);
      LossTerms sum;
      for (const auto& group : groups) {
        const ViewBatch views = sample_views(dataset, group, config.aug_ratio, augment_rng);
        notify(Phase::Regular);
        const LossTerms terms = regular_step(state, views, config);
        sum.drin += terms.drin;
        sum.rr_invariance += terms.rr_invariance;
        sum.rr_decorrelation += terms.rr_decorrelation;
        sum.combined += terms.combined;
        if (meta) {
          notify(Phase::Trial);
          TrialWeights trial = trial_weights(state, views, config);
          notify(Phase::Meta);
          meta_step(state, trial, views, config);
        }
      }
      const auto n = static_cast<double>(groups.size());
      const DRWeight::Stats rs = state.r.stats();
      EpochRecord rec;
      rec.epoch = epoch + 1;
      rec.loss_drin = sum.drin / n;
      rec.loss_rr_inv = sum.rr_invariance / n;
      rec.loss_rr_dec = sum.rr_decorrelation / n;
      rec.loss_combined = sum.combined / n;
      rec.r_min = rs.min;
      rec.r_mean = rs.mean;
      rec.r_max = rs.max;
      rec.r_at_zero = rs.at_zero;
      rec.r_at_one = rs.at_one;
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      state.history.push_back(rec);
      state.epoch = epoch + 1;
      if (log) {
        log << to_json_line(rec) << "\n";
        log.flush();
      }
    }
  } catch (const Error&) {
    if (options.out_dir) write_checkpoint(*options.out_dir, state, ".partial");
    throw;
  }
  if (options.out_dir) write_checkpoint(*options.out_dir, state, "");
  return state;
}

}  // namespace drgcl
