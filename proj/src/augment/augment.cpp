// SPDX-License-Identifier: Apache-2.0
#include "drgcl/augment/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "drgcl/util/error.hpp"

namespace drgcl {
namespace {

// `k` distinct indices of [0, n), uniformly, via a partial Fisher-Yates.
std::vector<std::size_t> choose(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
  pool.resize(k);
  return pool;
}

Graph induced(const Graph& g, const std::vector<bool>& keep) {
  std::vector<std::size_t> new_id(g.num_nodes, SIZE_MAX);
  std::size_t n = 0;
  for (std::size_t v = 0; v < g.num_nodes; ++v)
    if (keep[v]) new_id[v] = n++;
  Graph out;
  out.num_nodes = n;
  out.label = g.label;
  const std::size_t width = g.node_features.cols();
  out.node_features = Tensor({n, width});
  for (std::size_t v = 0; v < g.num_nodes; ++v) {
    if (!keep[v]) continue;
    std::copy_n(g.node_features.raw() + v * width, width, out.node_features.raw() + new_id[v] * width);
    if (!g.node_labels.empty()) out.node_labels.push_back(g.node_labels[v]);
  }
  for (const auto& [u, v] : g.edges)
    if (keep[u] && keep[v]) out.edges.emplace_back(new_id[u], new_id[v]);
  return out;
}

Graph node_drop(const Graph& g, double ratio, Rng& rng) {
  const std::size_t drop = std::min(scaled_count(ratio, g.num_nodes), g.num_nodes - 1);
  if (drop == 0) return g;
  std::vector<bool> keep(g.num_nodes, true);
  for (auto v : choose(g.num_nodes, drop, rng)) keep[v] = false;
  return induced(g, keep);
}

Graph edge_perturb(const Graph& g, double ratio, Rng& rng) {
  const std::size_t k = scaled_count(ratio, g.edges.size());
  if (k == 0) return g;
  Graph out = g;
  std::vector<bool> removed(g.edges.size(), false);
  for (auto e : choose(g.edges.size(), k, rng)) removed[e] = true;
  out.edges.clear();
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (!removed[e]) out.edges.push_back(g.edges[e]);

  const std::size_t n = g.num_nodes;
  const std::size_t pairs = n * (n - 1) / 2;
  const std::size_t free_pairs = pairs - g.edges.size();
  const std::size_t add = std::min(k, free_pairs);
  if (add > 0) {
    const std::set<Edge> existing(g.edges.begin(), g.edges.end());
    std::vector<Edge> fresh;
    if (pairs <= 4'000'000) {
      std::vector<Edge> candidates;
      candidates.reserve(free_pairs);
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
          if (!existing.count({u, v})) candidates.emplace_back(u, v);
      for (auto i : choose(candidates.size(), add, rng)) fresh.push_back(candidates[i]);
    } else {
      std::set<Edge> taken = existing;
      while (fresh.size() < add) {
        std::size_t u = uniform_index(rng, n), v = uniform_index(rng, n);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (taken.insert({u, v}).second) fresh.emplace_back(u, v);
      }
    }
    out.edges.insert(out.edges.end(), fresh.begin(), fresh.end());
  }
  out.edges = canonical_edges(std::move(out.edges));
  return out;
}

Graph attr_mask(const Graph& g, double ratio, Rng& rng) {
  const std::size_t k = scaled_count(ratio, g.num_nodes);
  if (k == 0) return g;
  Graph out = g;
  const std::size_t width = g.node_features.cols();
  for (auto v : choose(g.num_nodes, k, rng))
    std::fill_n(out.node_features.raw() + v * width, width, 0.0);
  return out;
}

Graph subgraph(const Graph& g, double ratio, Rng& rng) {
  const std::size_t n = g.num_nodes;
  std::size_t target = static_cast<std::size_t>(std::ceil((1.0 - ratio) * static_cast<double>(n) - 1e-9));
  target = std::clamp<std::size_t>(target, 1, n);
  if (target == n) return g;

  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<bool> keep(n, false);
  std::size_t collected = 0;
  auto restart = [&]() {
    std::vector<std::size_t> open;
    for (std::size_t v = 0; v < n; ++v)
      if (!keep[v]) open.push_back(v);
    const std::size_t v = open[uniform_index(rng, open.size())];
    keep[v] = true;
    ++collected;
    return v;
  };
  auto frontier_empty = [&]() {
    for (std::size_t v = 0; v < n; ++v)
      if (keep[v])
        for (auto u : adj[v])
          if (!keep[u]) return false;
    return true;
  };

  std::size_t current = restart();
  std::size_t idle = 0;
  while (collected < target) {
    if (adj[current].empty() || (idle > 2 * n + 8 && frontier_empty())) {
      current = restart();
      idle = 0;
      continue;
    }
    if (idle > 2 * n + 8) idle = 0;
    current = adj[current][uniform_index(rng, adj[current].size())];
    if (!keep[current]) {
      keep[current] = true;
      ++collected;
      idle = 0;
    } else {
      ++idle;
    }
  }
  return induced(g, keep);
}

}  // namespace

std::string to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::NodeDrop: return "node-drop";
    case AugmentKind::EdgePerturb: return "edge-perturb";
    case AugmentKind::AttrMask: return "attr-mask";
    case AugmentKind::Subgraph: return "subgraph";
  }
  return "?";
}

std::size_t scaled_count(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
}

Graph sample_view(const Graph& g, const AugmentSpec& spec, Rng& rng) {
  if (g.num_nodes == 0) throw DataError("sample_view: graph has no nodes");
  if (!(spec.ratio >= 0.0 && spec.ratio <= 1.0))
    throw DataError("augmentation ratio must lie in [0, 1]");
  switch (spec.kind) {
    case AugmentKind::NodeDrop: return node_drop(g, spec.ratio, rng);
    case AugmentKind::EdgePerturb: return edge_perturb(g, spec.ratio, rng);
    case AugmentKind::AttrMask: return attr_mask(g, spec.ratio, rng);
    case AugmentKind::Subgraph: return subgraph(g, spec.ratio, rng);
  }
  return g;
}

ViewPair sample_pair(const Graph& g, double ratio, Rng& rng) {
  const AugmentKind k1 = kAllAugmentKinds[uniform_index(rng, kAllAugmentKinds.size())];
  const AugmentKind k2 = kAllAugmentKinds[uniform_index(rng, kAllAugmentKinds.size())];
  Graph a = sample_view(g, {k1, ratio}, rng);
  Graph b = sample_view(g, {k2, ratio}, rng);
  return {std::move(a), std::move(b), k1, k2};
}

}  // namespace drgcl
