// SPDX-License-Identifier: Apache-2.0
#include "drgcl/eval/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "drgcl/util/error.hpp"

namespace drgcl {

std::size_t preserved_count(double rate, std::size_t dims) {
  if (!(rate > 0.0 && rate <= 1.0))
    throw DomainError("sweep rate " + std::to_string(rate) + " outside (0, 1]");
  const auto count = static_cast<std::size_t>(std::floor(rate * static_cast<double>(dims) + 0.5));
  if (count == 0)
    throw DomainError("sweep rate " + std::to_string(rate) + " preserves no dimension of " +
                      std::to_string(dims));
  return std::min(count, dims);
}

std::uint64_t hash_dimensions(std::span<const std::size_t> dims) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t d : dims) {
    for (int b = 0; b < 8; ++b) {
      h ^= (static_cast<std::uint64_t>(d) >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

EmbeddingTable mask_dimensions(const EmbeddingTable& table, std::span<const std::size_t> dims) {
  EmbeddingTable out = table;
  std::vector<char> keep(table.dims(), 0);
  for (std::size_t d : dims) {
    if (d >= table.dims()) throw ShapeError("mask_dimensions: dimension out of range");
    keep[d] = 1;
  }
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t k = 0; k < out.dims(); ++k)
      if (!keep[k]) out.matrix(i, k) = 0.0;
  return out;
}

std::vector<SweepRecord> dimension_sweep(const EmbeddingTable& table, const SweepOptions& options,
                                         Rng& rng) {
  const std::size_t dims = table.dims();
  std::vector<std::size_t> counts;
  for (double rate : options.rates) counts.push_back(preserved_count(rate, dims));

  CvOptions cv = options.cv;
  cv.seeds = 1;

  std::vector<SweepRecord> records;
  std::vector<std::size_t> all(dims);
  std::iota(all.begin(), all.end(), std::size_t{0});
  records.push_back({1.0, 0, dims, hash_dimensions(all), linear_classify_cv(table, cv).mean});

  for (std::size_t r = 0; r < options.rates.size(); ++r) {
    for (std::size_t t = 0; t < options.trials_per_rate; ++t) {
      std::vector<std::size_t> pool = all;
      for (std::size_t i = 0; i < counts[r]; ++i)
        std::swap(pool[i], pool[i + uniform_index(rng, dims - i)]);
      std::vector<std::size_t> chosen(pool.begin(), pool.begin() + counts[r]);
      std::sort(chosen.begin(), chosen.end());
      const double acc = linear_classify_cv(mask_dimensions(table, chosen), cv).mean;
      records.push_back({options.rates[r], t, counts[r], hash_dimensions(chosen), acc});
    }
  }
  return records;
}

void write_sweep_csv(const std::filesystem::path& file, const std::vector<SweepRecord>& records) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << "rate,trial,preserved_count,accuracy\n";
  char buf[96];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.15g,%zu,%zu,%.17g\n", r.rate, r.trial, r.preserved_count,
                  r.accuracy);
    out << buf;
  }
}

}  // namespace drgcl
