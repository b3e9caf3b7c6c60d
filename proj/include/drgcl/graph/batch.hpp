// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "drgcl/autodiff/tape.hpp"
#include "drgcl/graph/graph.hpp"
#include "drgcl/util/rng.hpp"

namespace drgcl {

// Block-diagonal minibatch: node rows of all member graphs stacked in order.
struct Batch {
  Tensor features;         // total_nodes x feature_dim
  IndexList edge_src;      // directed message edges (both orientations)
  IndexList edge_dst;
  IndexList segments;      // node row -> graph position in the batch
  std::size_t num_graphs = 0;
  std::size_t num_nodes = 0;
  std::vector<std::size_t> labels;
};

Batch collate(std::span<const Graph> graphs);
Batch collate(std::span<const Graph* const> graphs);

// Index groups of one epoch: every index of [0, n) exactly once. A final
// group shorter than 2 is merged into the previous one.
std::vector<std::vector<std::size_t>> plan_batches(std::size_t n, std::size_t batch_size, Rng& rng,
                                                   bool shuffle);

std::vector<Batch> make_batches(const Dataset& dataset, std::size_t batch_size, Rng& rng,
                                bool shuffle);

}  // namespace drgcl
