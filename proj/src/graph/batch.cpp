// SPDX-License-Identifier: Apache-2.0
#include "drgcl/graph/batch.hpp"

#include <algorithm>
#include <numeric>

#include "drgcl/autodiff/ops.hpp"
#include "drgcl/util/error.hpp"

namespace drgcl {

Batch collate(std::span<const Graph* const> graphs) {
  if (graphs.empty()) throw DataError("collate: empty batch");
  const std::size_t width = graphs.front()->node_features.cols();
  std::size_t total = 0;
  for (const Graph* g : graphs) {
    if (g->node_features.cols() != width) throw DataError("collate: feature widths differ");
    total += g->num_nodes;
  }
  Batch b;
  b.num_graphs = graphs.size();
  b.num_nodes = total;
  b.features = Tensor({total, width});
  std::vector<std::size_t> src, dst, seg;
  seg.reserve(total);
  std::size_t offset = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = *graphs[gi];
    std::copy(g.node_features.data().begin(), g.node_features.data().end(),
              b.features.raw() + offset * width);
    for (const auto& [u, v] : g.edges) {
      src.push_back(offset + u);
      dst.push_back(offset + v);
      src.push_back(offset + v);
      dst.push_back(offset + u);
    }
    seg.insert(seg.end(), g.num_nodes, gi);
    b.labels.push_back(g.label);
    offset += g.num_nodes;
  }
  b.edge_src = ops::make_index(std::move(src));
  b.edge_dst = ops::make_index(std::move(dst));
  b.segments = ops::make_index(std::move(seg));
  return b;
}

Batch collate(std::span<const Graph> graphs) {
  std::vector<const Graph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const Graph& g : graphs) ptrs.push_back(&g);
  return collate(std::span<const Graph* const>(ptrs));
}

std::vector<std::vector<std::size_t>> plan_batches(std::size_t n, std::size_t batch_size, Rng& rng,
                                                   bool shuffle) {
  if (batch_size < 2) throw DataError("batch size must be at least 2");
  if (n < 2) throw DataError("need at least 2 graphs to form a contrastive batch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) shuffle_range(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t stop = std::min(n, start + batch_size);
    groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                        order.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  if (groups.size() > 1 && groups.back().size() < 2) {
    auto tail = std::move(groups.back());
    groups.pop_back();
    groups.back().insert(groups.back().end(), tail.begin(), tail.end());
  }
  return groups;
}

std::vector<Batch> make_batches(const Dataset& dataset, std::size_t batch_size, Rng& rng,
                                bool shuffle) {
  std::vector<Batch> out;
  for (const auto& group : plan_batches(dataset.graphs.size(), batch_size, rng, shuffle)) {
    std::vector<const Graph*> members;
    for (auto i : group) members.push_back(&dataset.graphs[i]);
    out.push_back(collate(std::span<const Graph* const>(members)));
  }
  return out;
}

}  // namespace drgcl
