// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "drgcl/eval/cross_validation.hpp"
#include "drgcl/util/rng.hpp"

namespace drgcl {

struct SweepRecord {
  double rate = 1.0;
  std::size_t trial = 0;
  std::size_t preserved_count = 0;
  std::uint64_t preserved_hash = 0;
  double accuracy = 0.0;
};

struct SweepOptions {
  std::vector<double> rates{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t trials_per_rate = 20;
  CvOptions cv;  // seeds is forced to 1
};

std::size_t preserved_count(double rate, std::size_t dims);
std::uint64_t hash_dimensions(std::span<const std::size_t> dims);

// Keeps only `dims` columns, zeroing the rest.
EmbeddingTable mask_dimensions(const EmbeddingTable& table, std::span<const std::size_t> dims);

// First record is the rate-1.0 baseline (trial 0); then rates in the given
// order, trials_per_rate each.
std::vector<SweepRecord> dimension_sweep(const EmbeddingTable& table, const SweepOptions& options,
                                         Rng& rng);

void write_sweep_csv(const std::filesystem::path& file, const std::vector<SweepRecord>& records);

}  // namespace drgcl
