// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drgcl/eval/embeddings.hpp"
#include "drgcl/eval/linear_svm.hpp"

namespace drgcl {

struct CvOptions {
  std::size_t folds = 10;
  std::size_t seeds = 5;
  std::size_t inner_folds = 3;
  std::vector<double> c_grid{1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
  std::uint64_t seed = 0;  // root of the "cv-folds" stream
  double tolerance = 1e-6;
  std::size_t max_iterations = 10000;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

struct CvReport {
  std::vector<std::vector<double>> fold_accuracies;  // [seed][fold]
  std::vector<std::vector<double>> chosen_c;         // [seed][fold]
  std::vector<std::vector<std::size_t>> assignments; // [seed][row] -> fold
  std::vector<std::uint64_t> fold_seeds;
  std::vector<double> seed_means;
  double mean = 0.0;
  double std = 0.0;  // population std of seed_means
};

// Stratified-as-possible assignment: each class is shuffled, classes are
// laid end to end, and position i goes to fold i mod folds.
std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t folds,
                                          std::uint64_t seed);

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);

// Fits on (train_x, train_y) with C chosen by inner CV over options.c_grid.
// Ties keep the earlier grid entry.
double select_c(const Tensor& train_x, std::span<const std::size_t> train_y,
                const CvOptions& options, std::uint64_t seed);

CvReport linear_classify_cv(const EmbeddingTable& table, const CvOptions& options);

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace drgcl
