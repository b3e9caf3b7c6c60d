// SPDX-License-Identifier: Apache-2.0
#include "drgcl/graph/graph.hpp"

#include <algorithm>

#include "drgcl/util/error.hpp"

namespace drgcl {

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(num_nodes, 0);
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

void Graph::validate() const {
  if (node_features.rows() != num_nodes || node_features.rank() != 2)
    throw DataError("graph: feature rows " + std::to_string(node_features.rows()) +
                    " != node count " + std::to_string(num_nodes));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    if (u >= num_nodes || v >= num_nodes) throw DataError("graph: edge endpoint out of range");
    if (u == v) throw DataError("graph: self-loop present");
    if (u > v) throw DataError("graph: edge not in canonical (u < v) order");
    if (i > 0 && !(edges[i - 1] < edges[i])) throw DataError("graph: edges unsorted or duplicated");
  }
  if (!node_labels.empty() && node_labels.size() != num_nodes)
    throw DataError("graph: node label count differs from node count");
}

std::vector<Edge> canonical_edges(std::vector<Edge> edges, EdgeCleanup* report) {
  std::size_t loops = 0;
  std::erase_if(edges, [&](const Edge& e) { return e.first == e.second && ++loops; });
  // A pair listed in both orientations is one undirected edge; only a pair
  // repeated in the same orientation counts as a duplicate.
  std::sort(edges.begin(), edges.end());
  const std::size_t directed = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (report) {
    report->self_loops += loops;
    report->duplicates += directed - edges.size();
  }
  for (auto& [u, v] : edges)
    if (u > v) std::swap(u, v);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Graph permute_nodes(const Graph& g, const std::vector<std::size_t>& perm) {
  if (perm.size() != g.num_nodes) throw DataError("permute_nodes: permutation size mismatch");
  Graph out;
  out.num_nodes = g.num_nodes;
  out.label = g.label;
  out.node_features = Tensor({g.num_nodes, g.node_features.cols()});
  if (!g.node_labels.empty()) out.node_labels.resize(g.num_nodes);
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    for (std::size_t c = 0; c < g.node_features.cols(); ++c)
      out.node_features(perm[i], c) = g.node_features(i, c);
    if (!g.node_labels.empty()) out.node_labels[perm[i]] = g.node_labels[i];
  }
  std::vector<Edge> edges;
  edges.reserve(g.edges.size());
  for (const auto& [u, v] : g.edges) edges.emplace_back(perm[u], perm[v]);
  out.edges = canonical_edges(std::move(edges));
  return out;
}

std::string to_string(FeatureKind kind) {
  return kind == FeatureKind::NodeLabelOneHot ? "node-label-one-hot" : "degree-one-hot";
}

}  // namespace drgcl
