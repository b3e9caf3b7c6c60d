// SPDX-License-Identifier: Apache-2.0
#include "drgcl/eval/cross_validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "drgcl/util/error.hpp"
#include "drgcl/util/rng.hpp"

namespace drgcl {

namespace {

Tensor take_rows(const Tensor& x, std::span<const std::size_t> rows) {
  Tensor out({rows.size(), x.cols()});
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(x.raw() + rows[i] * x.cols(), x.cols(), out.raw() + i * x.cols());
  return out;
}

std::vector<std::size_t> take(std::span<const std::size_t> v, std::span<const std::size_t> rows) {
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(v[r]);
  return out;
}

struct Split {
  std::vector<std::size_t> train, test;
};

Split split(std::span<const std::size_t> assignment, std::size_t fold) {
  Split s;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    (assignment[i] == fold ? s.test : s.train).push_back(i);
  return s;
}

SvmOptions svm_options(const CvOptions& o, double c, std::uint64_t seed) {
  return SvmOptions{c, o.tolerance, o.max_iterations, seed};
}

double fit_and_score(const Tensor& x, std::span<const std::size_t> y, const Split& s,
                     const SvmOptions& svm) {
  const Tensor train_raw = take_rows(x, s.train);
  const Standardizer standardizer = Standardizer::fit(train_raw);
  LinearClassifier clf;
  const auto train_y = take(y, s.train);
  clf.fit(standardizer.apply(train_raw), train_y, svm);
  const auto predicted = clf.predict(standardizer.apply(take_rows(x, s.test)));
  return accuracy(predicted, take(y, s.test));
}

}  // namespace

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw DomainError("stratified_folds: need at least 2 folds");
  if (labels.size() < folds)
    throw DomainError("stratified_folds: " + std::to_string(labels.size()) +
                      " rows cannot fill " + std::to_string(folds) + " folds");
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  std::vector<std::size_t> order;
  for (auto& [cls, rows] : by_class) {
    shuffle_range(rows.begin(), rows.end(), rng);
    order.insert(order.end(), rows.begin(), rows.end());
  }
  std::vector<std::size_t> assignment(labels.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) assignment[order[pos]] = pos % folds;
  return assignment;
}

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size()) throw ShapeError("accuracy: length mismatch");
  if (truth.empty()) throw DomainError("accuracy: empty fold");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double select_c(const Tensor& train_x, std::span<const std::size_t> train_y,
                const CvOptions& options, std::uint64_t seed) {
  if (options.c_grid.empty()) throw ConfigError("C grid is empty");
  if (options.c_grid.size() == 1 || train_y.size() < options.inner_folds)
    return options.c_grid.front();
  const auto inner = stratified_folds(train_y, options.inner_folds, seed);
  double best_c = options.c_grid.front();
  double best_score = -1.0;
  for (std::size_t ci = 0; ci < options.c_grid.size(); ++ci) {
    double score = 0.0;
    for (std::size_t f = 0; f < options.inner_folds; ++f)
      score += fit_and_score(train_x, train_y, split(inner, f),
                             svm_options(options, options.c_grid[ci], derive_seed(seed, "svm", f)));
    if (score > best_score) {
      best_score = score;
      best_c = options.c_grid[ci];
    }
  }
  return best_c;
}

CvReport linear_classify_cv(const EmbeddingTable& table, const CvOptions& options) {
  if (table.matrix.rows() != table.labels.size())
    throw ShapeError("linear_classify_cv: row count != label count");
  if (options.seeds == 0) throw ConfigError("cv seeds must be positive");
  if (!table.matrix.all_finite()) throw NumericError("linear_classify_cv: non-finite embedding");

  CvReport report;
  for (std::size_t s = 0; s < options.seeds; ++s) {
    report.fold_seeds.push_back(derive_seed(options.seed, "cv-folds", s));
    report.assignments.push_back(
        stratified_folds(table.labels, options.folds, report.fold_seeds.back()));
  }
  report.fold_accuracies.assign(options.seeds, std::vector<double>(options.folds));
  report.chosen_c.assign(options.seeds, std::vector<double>(options.folds));

  parallel_for(options.seeds * options.folds, options.threads, [&](std::size_t task) {
    const std::size_t s = task / options.folds, f = task % options.folds;
    const Split sp = split(report.assignments[s], f);
    const std::uint64_t task_seed = derive_seed(report.fold_seeds[s], "fold", f);
    const Tensor train_x = take_rows(table.matrix, sp.train);
    const auto train_y = take(table.labels, sp.train);
    const double c = select_c(train_x, train_y, options, derive_seed(task_seed, "inner", 0));
    report.chosen_c[s][f] = c;
    report.fold_accuracies[s][f] = fit_and_score(table.matrix, table.labels, sp,
                                                 svm_options(options, c, task_seed));
  });

  for (const auto& folds : report.fold_accuracies)
    report.seed_means.push_back(std::accumulate(folds.begin(), folds.end(), 0.0) /
                                static_cast<double>(folds.size()));
  const double n = static_cast<double>(report.seed_means.size());
  report.mean = std::accumulate(report.seed_means.begin(), report.seed_means.end(), 0.0) / n;
  double var = 0.0;
  for (double m : report.seed_means) var += (m - report.mean) * (m - report.mean);
  report.std = std::sqrt(var / n);
  return report;
}

}  // namespace drgcl
