// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "drgcl/graph/graph.hpp"
#include "drgcl/model/model.hpp"
#include "drgcl/objectives/dr_weight.hpp"

namespace drgcl {

enum class EmbeddingSource { Encoder, RrHead, DrinHead };

std::string to_string(EmbeddingSource source);
EmbeddingSource parse_embedding_source(const std::string& name);

struct EmbeddingTable {
  Tensor matrix;  // M x D
  std::vector<std::size_t> labels;
  std::string checkpoint_id;
  std::string dataset;
  bool r_applied = false;
  EmbeddingSource source = EmbeddingSource::Encoder;

  std::size_t rows() const { return labels.size(); }
  std::size_t dims() const { return matrix.cols(); }
  std::size_t num_classes() const;
};

// Forward passes over the unaugmented graphs. Encoder embeddings are
// h (.) omega when apply_r, else h; head sources project those rows further.
EmbeddingTable extract_embeddings(const Dataset& dataset, const Model& model, const DRWeight& r,
                                  bool apply_r, EmbeddingSource source = EmbeddingSource::Encoder);

// CSV with header "label,dim_0,...,dim_{D-1}".
void write_embedding_csv(const std::filesystem::path& file, const EmbeddingTable& table);
EmbeddingTable read_embedding_csv(const std::filesystem::path& file);

}  // namespace drgcl
