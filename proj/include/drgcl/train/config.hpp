// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace drgcl {

// Hyper-parameters of a pre-training + evaluation run. Defaults follow the
// unsupervised setting: GIN [32,32,32] (D = 96), heads 512 wide, batch 128,
// 20 epochs, lr 0.01, tau 0.1, lambda 0.001, alpha 10.
struct RunConfig {
  std::string dataset = "MUTAG";
  std::string data_dir;
  std::size_t batch_size = 128;
  std::size_t epochs = 20;
  double pretrain_lr = 0.01;
  double meta_lr = 0.01;
  // Plain-gradient step of the trial weights; unset means pretrain_lr.
  std::optional<double> trial_lr;
  double tau = 0.1;
  double lambda = 0.001;
  double alpha = 10.0;
  double aug_ratio = 0.2;
  std::uint64_t seed = 0;
  bool enable_dr = true;
  bool enable_rr = true;
  std::optional<double> fixed_r;
  bool shuffle = true;
  bool inclusive_infonce = false;
  bool first_order_meta = false;

  std::size_t gin_hidden = 32;
  std::size_t gin_layers = 3;
  std::size_t proj_hidden = 512;
  std::size_t proj_out = 512;

  std::size_t cv_folds = 10;
  std::size_t cv_seeds = 5;
  std::vector<double> c_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<double> sweep_rates = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t sweep_trials = 20;

  double trial_rate() const { return trial_lr.value_or(pretrain_lr); }
  // Throws ConfigError when a value is out of range or toggles conflict.
  void validate() const;
};

// Sets one key from its text form. Setting fixed_R also switches enable_dr
// off; switching it back on while fixed_R is set fails validate().
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Flat "key = value" lines, '#' starts a comment. Errors carry
// "<source>:<line>:".
void apply_config_text(RunConfig& config, const std::string& text, const std::string& source);
RunConfig load_config_file(const std::string& path);

// Canonical text form; parsing it back yields an identical config.
std::string to_config_text(const RunConfig& config);

}  // namespace drgcl
