// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "drgcl/graph/graph.hpp"

namespace drgcl {

// Largest degree bucket used by the degree one-hot fallback.
inline constexpr std::size_t kMaxDegreeFeature = 1000;

// Reads the plain-text TU corpus `<directory>/<name>_{A,graph_indicator,
// graph_labels}.txt` (+ optional `_node_labels.txt`). Node features are a
// one-hot of the node label when present, else a one-hot of the node degree
// clamped at the observed maximum (capped at kMaxDegreeFeature).
// Self-loops and duplicate edges are dropped and counted in Dataset::cleanup.
Dataset load_tu_dataset(const std::filesystem::path& directory, const std::string& name);

// Writes `dataset` back in TU format (edges in both directions, 1-indexed).
// Node labels are written when every graph carries them.
void write_tu_dataset(const Dataset& dataset, const std::filesystem::path& directory);

}  // namespace drgcl
