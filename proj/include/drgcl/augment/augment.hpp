// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>

#include "drgcl/graph/graph.hpp"
#include "drgcl/util/rng.hpp"

namespace drgcl {

enum class AugmentKind { NodeDrop, EdgePerturb, AttrMask, Subgraph };

inline constexpr std::array<AugmentKind, 4> kAllAugmentKinds = {
    AugmentKind::NodeDrop, AugmentKind::EdgePerturb, AugmentKind::AttrMask, AugmentKind::Subgraph};

std::string to_string(AugmentKind kind);

struct AugmentSpec {
  AugmentKind kind = AugmentKind::NodeDrop;
  double ratio = 0.2;  // in [0, 1]
};

// round-half-up of ratio * n, the "⌊ratio·n⌉" count used by every kind.
std::size_t scaled_count(double ratio, std::size_t n);

// One stochastic view of `g`:
//   node-drop     remove round(ratio*n) nodes (at least one survives)
//   edge-perturb  remove round(ratio*|E|) edges, add as many new non-edges
//   attr-mask     zero the feature rows of round(ratio*n) nodes
//   subgraph      random walk until ceil((1-ratio)*n) distinct nodes
// Surviving nodes keep their relative order.
Graph sample_view(const Graph& g, const AugmentSpec& spec, Rng& rng);

struct ViewPair {
  Graph first;
  Graph second;
  AugmentKind first_kind;
  AugmentKind second_kind;
};

// Two views under independently and uniformly drawn kinds.
ViewPair sample_pair(const Graph& g, double ratio, Rng& rng);

}  // namespace drgcl
