// SPDX-License-Identifier: Apache-2.0
#include "drgcl/eval/embeddings.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "drgcl/graph/batch.hpp"
#include "drgcl/objectives/losses.hpp"
#include "drgcl/util/error.hpp"

namespace drgcl {

namespace {
constexpr std::size_t kChunk = 256;
}

std::string to_string(EmbeddingSource source) {
  switch (source) {
    case EmbeddingSource::Encoder: return "encoder";
    case EmbeddingSource::RrHead: return "rr-head";
    case EmbeddingSource::DrinHead: return "drin-head";
  }
  return "?";
}

EmbeddingSource parse_embedding_source(const std::string& name) {
  if (name == "encoder") return EmbeddingSource::Encoder;
  if (name == "rr-head") return EmbeddingSource::RrHead;
  if (name == "drin-head") return EmbeddingSource::DrinHead;
  throw ConfigError("unknown embedding source '" + name + "' (encoder, rr-head, drin-head)");
}

std::size_t EmbeddingTable::num_classes() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

EmbeddingTable extract_embeddings(const Dataset& dataset, const Model& model, const DRWeight& r,
                                  bool apply_r, EmbeddingSource source) {
  if (dataset.feature_dim != model.encoder_config.input_dim)
    throw ShapeError("extract_embeddings: dataset feature width " +
                     std::to_string(dataset.feature_dim) + " != encoder input width " +
                     std::to_string(model.encoder_config.input_dim));
  if (apply_r && r.size() != model.embedding_dim())
    throw ShapeError("extract_embeddings: DR weight length does not match embedding width");

  const std::size_t width = source == EmbeddingSource::Encoder ? model.embedding_dim()
                                                               : model.head_config.output;
  EmbeddingTable table;
  table.matrix = Tensor({dataset.graphs.size(), width});
  table.dataset = dataset.name;
  table.r_applied = apply_r;
  table.source = source;
  for (std::size_t start = 0; start < dataset.graphs.size(); start += kChunk) {
    const std::size_t stop = std::min(dataset.graphs.size(), start + kChunk);
    const Batch batch = collate(std::span<const Graph>(dataset.graphs.data() + start, stop - start));
    Tape tape;
    const auto enc = model.encoder.bind(tape, false);
    Var h = encode(batch, enc, model.encoder_config);
    if (apply_r) h = apply_dr(h, tape.constant(r.effective_row()));
    if (source == EmbeddingSource::RrHead) h = project(h, model.rr_head.bind(tape, false));
    if (source == EmbeddingSource::DrinHead) h = project(h, model.drin_head.bind(tape, false));
    const Tensor& v = h.value();
    std::copy(v.data().begin(), v.data().end(), table.matrix.raw() + start * width);
  }
  for (const Graph& g : dataset.graphs) table.labels.push_back(g.label);
  return table;
}

void write_embedding_csv(const std::filesystem::path& file, const EmbeddingTable& table) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << "label";
  for (std::size_t k = 0; k < table.dims(); ++k) out << ",dim_" << k;
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out << table.labels[i];
    for (std::size_t k = 0; k < table.dims(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", table.matrix(i, k));
      out << "," << buf;
    }
    out << "\n";
  }
}

EmbeddingTable read_embedding_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(file.string() + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "label")
    throw DataError(file.string() + ": header must start with 'label'");
  for (std::size_t k = 1; k < header.size(); ++k)
    if (header[k] != "dim_" + std::to_string(k - 1))
      throw DataError(file.string() + ": unexpected header column '" + header[k] + "'");
  const std::size_t dims = header.size() - 1;

  EmbeddingTable table;
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        if (col == 0) {
          const long label = std::stol(cell, &used);
          if (label < 0) throw std::invalid_argument(cell);
          table.labels.push_back(static_cast<std::size_t>(label));
        } else {
          values.push_back(std::stod(cell, &used));
        }
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError(file.string() + ":" + std::to_string(lineno) + ": malformed value '" +
                        cell + "'");
      }
      ++col;
    }
    if (col != dims + 1)
      throw DataError(file.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(dims + 1) + " columns, got " + std::to_string(col));
  }
  table.matrix = Tensor({table.labels.size(), dims}, std::move(values));
  table.checkpoint_id = file.string();
  return table;
}

}  // namespace drgcl
