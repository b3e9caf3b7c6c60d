// SPDX-License-Identifier: Apache-2.0
#include "drgcl/graph/tu_format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <string_view>

#include "drgcl/util/error.hpp"

namespace drgcl {
namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  const auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

long parse_long(std::string_view text, const fs::path& file, std::size_t line) {
  text = trim(text);
  long value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw DataError(file.string() + ":" + std::to_string(line) + ": expected an integer, got '" +
                    std::string(text) + "'");
  return value;
}

std::ifstream open_required(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("missing TU file " + file.string());
  return in;
}

std::vector<long> read_column(const fs::path& file) {
  auto in = open_required(file);
  std::vector<long> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    values.push_back(parse_long(line, file, lineno));
  }
  return values;
}

std::vector<std::pair<long, long>> read_edges(const fs::path& file) {
  auto in = open_required(file);
  std::vector<std::pair<long, long>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (trim(s).empty()) continue;
    const auto comma = s.find(',');
    if (comma == std::string_view::npos || s.find(',', comma + 1) != std::string_view::npos)
      throw DataError(file.string() + ":" + std::to_string(lineno) +
                      ": expected exactly two comma-separated node ids");
    edges.emplace_back(parse_long(s.substr(0, comma), file, lineno),
                       parse_long(s.substr(comma + 1), file, lineno));
  }
  return edges;
}

}  // namespace

Dataset load_tu_dataset(const fs::path& directory, const std::string& name) {
  const fs::path base = directory / name;
  const auto indicator = read_column(base.string() + "_graph_indicator.txt");
  const auto graph_labels = read_column(base.string() + "_graph_labels.txt");
  const auto raw_edges = read_edges(base.string() + "_A.txt");
  const fs::path node_label_file = base.string() + "_node_labels.txt";
  std::vector<long> node_labels;
  const bool has_node_labels = fs::exists(node_label_file);
  if (has_node_labels) {
    node_labels = read_column(node_label_file);
    if (node_labels.size() != indicator.size())
      throw DataError(node_label_file.string() + ": " + std::to_string(node_labels.size()) +
                      " labels for " + std::to_string(indicator.size()) + " nodes");
  }

  const std::size_t num_graphs = graph_labels.size();
  const std::size_t total_nodes = indicator.size();
  if (num_graphs == 0) throw DataError(name + ": no graphs");

  // Group nodes by indicator value; each graph keeps its nodes in id order.
  std::vector<std::size_t> graph_of(total_nodes), local_of(total_nodes);
  std::vector<std::size_t> sizes(num_graphs, 0);
  for (std::size_t v = 0; v < total_nodes; ++v) {
    const long gid = indicator[v];
    if (gid < 1 || static_cast<std::size_t>(gid) > num_graphs)
      throw DataError(name + ": graph indicator " + std::to_string(gid) + " at node " +
                      std::to_string(v + 1) + " outside 1.." + std::to_string(num_graphs));
    graph_of[v] = static_cast<std::size_t>(gid - 1);
    local_of[v] = sizes[graph_of[v]]++;
  }
  for (std::size_t g = 0; g < num_graphs; ++g)
    if (sizes[g] == 0) throw DataError(name + ": graph " + std::to_string(g + 1) + " has no nodes");

  std::vector<std::vector<Edge>> edges(num_graphs);
  for (const auto& [a, b] : raw_edges) {
    if (a < 1 || b < 1 || static_cast<std::size_t>(a) > total_nodes ||
        static_cast<std::size_t>(b) > total_nodes)
      throw DataError(name + ": edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") references a node outside 1.." + std::to_string(total_nodes));
    const std::size_t u = static_cast<std::size_t>(a - 1), v = static_cast<std::size_t>(b - 1);
    if (graph_of[u] != graph_of[v])
      throw DataError(name + ": edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") joins two different graphs");
    edges[graph_of[u]].emplace_back(local_of[u], local_of[v]);
  }

  Dataset ds;
  ds.name = name;
  std::set<long> class_set(graph_labels.begin(), graph_labels.end());
  ds.class_values.assign(class_set.begin(), class_set.end());
  ds.num_classes = ds.class_values.size();

  ds.graphs.resize(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    Graph& gr = ds.graphs[g];
    gr.num_nodes = sizes[g];
    gr.edges = canonical_edges(std::move(edges[g]), &ds.cleanup);
    gr.label = static_cast<std::size_t>(
        std::lower_bound(ds.class_values.begin(), ds.class_values.end(), graph_labels[g]) -
        ds.class_values.begin());
    if (has_node_labels) gr.node_labels.resize(gr.num_nodes);
  }
  if (has_node_labels)
    for (std::size_t v = 0; v < total_nodes; ++v)
      ds.graphs[graph_of[v]].node_labels[local_of[v]] = node_labels[v];

  if (has_node_labels) {
    ds.feature_kind = FeatureKind::NodeLabelOneHot;
    std::set<long> label_set(node_labels.begin(), node_labels.end());
    const std::vector<long> values(label_set.begin(), label_set.end());
    ds.feature_dim = values.size();
    for (Graph& gr : ds.graphs) {
      gr.node_features = Tensor({gr.num_nodes, ds.feature_dim});
      for (std::size_t v = 0; v < gr.num_nodes; ++v) {
        const auto col = static_cast<std::size_t>(
            std::lower_bound(values.begin(), values.end(), gr.node_labels[v]) - values.begin());
        gr.node_features(v, col) = 1.0;
      }
    }
  } else {
    ds.feature_kind = FeatureKind::DegreeOneHot;
    std::size_t max_degree = 0;
    for (const Graph& gr : ds.graphs)
      for (std::size_t d : gr.degrees()) max_degree = std::max(max_degree, d);
    const std::size_t cap = std::min(max_degree, kMaxDegreeFeature);
    ds.feature_dim = cap + 1;
    for (Graph& gr : ds.graphs) {
      gr.node_features = Tensor({gr.num_nodes, ds.feature_dim});
      const auto deg = gr.degrees();
      for (std::size_t v = 0; v < gr.num_nodes; ++v) gr.node_features(v, std::min(deg[v], cap)) = 1.0;
    }
  }
  for (const Graph& gr : ds.graphs) gr.validate();
  return ds;
}

void write_tu_dataset(const Dataset& dataset, const fs::path& directory) {
  fs::create_directories(directory);
  const fs::path base = directory / dataset.name;
  std::ofstream a(base.string() + "_A.txt");
  std::ofstream ind(base.string() + "_graph_indicator.txt");
  std::ofstream lab(base.string() + "_graph_labels.txt");
  const bool with_node_labels =
      std::all_of(dataset.graphs.begin(), dataset.graphs.end(),
                  [](const Graph& g) { return g.node_labels.size() == g.num_nodes; });
  std::ofstream nl;
  if (with_node_labels) nl.open(base.string() + "_node_labels.txt");
  if (!a || !ind || !lab || (with_node_labels && !nl))
    throw DataError("cannot write TU files under " + directory.string());

  std::size_t offset = 0;
  for (std::size_t g = 0; g < dataset.graphs.size(); ++g) {
    const Graph& gr = dataset.graphs[g];
    for (const auto& [u, v] : gr.edges) {
      a << offset + u + 1 << ", " << offset + v + 1 << "\n";
      a << offset + v + 1 << ", " << offset + u + 1 << "\n";
    }
    for (std::size_t v = 0; v < gr.num_nodes; ++v) {
      ind << g + 1 << "\n";
      if (with_node_labels) nl << gr.node_labels[v] << "\n";
    }
    const long value = dataset.class_values.empty()
                           ? static_cast<long>(gr.label)
                           : dataset.class_values.at(gr.label);
    lab << value << "\n";
    offset += gr.num_nodes;
  }
}

}  // namespace drgcl
