// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "drgcl/autodiff/tensor.hpp"

namespace drgcl {

using Edge = std::pair<std::size_t, std::size_t>;

// Undirected graph. Edges are stored once as (u, v) with u < v, sorted,
// without self-loops.
struct Graph {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;
  Tensor node_features;  // num_nodes x feature_dim
  std::size_t label = 0;
  // Raw integer node labels when the source corpus had them (kept so a
  // dataset can be written back out); empty otherwise.
  std::vector<long> node_labels;

  std::vector<std::size_t> degrees() const;
  // Throws DataError on any broken invariant.
  void validate() const;
};

struct EdgeCleanup {
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
};

// Canonicalizes an arbitrary edge list: drops self-loops, orients u < v,
// sorts and deduplicates. Self-loops and pairs repeated in the same
// orientation are counted into `report` if given.
std::vector<Edge> canonical_edges(std::vector<Edge> edges, EdgeCleanup* report = nullptr);

// Same graph with nodes relabelled: node i of the input becomes node
// perm[i] of the output.
Graph permute_nodes(const Graph& g, const std::vector<std::size_t>& perm);

enum class FeatureKind { NodeLabelOneHot, DegreeOneHot };

std::string to_string(FeatureKind kind);

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  FeatureKind feature_kind = FeatureKind::NodeLabelOneHot;
  // Original graph label value of each remapped class index.
  std::vector<long> class_values;
  EdgeCleanup cleanup;
};

}  // namespace drgcl
