#include <doctest.h>

#include <filesystem>

#include "drgcl/model/checkpoint.hpp"
#include "drgcl/util/error.hpp"
#include "support/support.hpp"

using namespace drgcl;
namespace fs = std::filesystem;

namespace {

Tensor embed(const std::vector<Graph>& graphs, const Model& m) {
  Tape t;
  const auto p = m.encoder.bind(t, false);
  return encode(collate(std::span<const Graph>(graphs)), p, m.encoder_config).value();
}

Model small_model(std::size_t input_dim, std::uint64_t seed) {
  Rng rng(seed);
  return init_model({input_dim, 32, 3}, 16, 8, rng);
}

}  // namespace

TEST_CASE("isolated zero-feature node embeds to zero") {
  Graph g;
  g.num_nodes = 1;
  g.node_features = Tensor({1, 7});
  const Model m = small_model(7, 1);
  CHECK(embed({g}, m) == Tensor::zeros(1, 96));
}

TEST_CASE("default widths give 96-dimensional embeddings") {
  Rng rng(2);
  const Dataset ds = testing::random_dataset(rng, 6, 7);
  const Model m = small_model(7, 2);
  const Tensor h = embed(ds.graphs, m);
  CHECK(h.rows() == 6);
  CHECK(h.cols() == 96);
  CHECK(m.embedding_dim() == 96);
}

TEST_CASE("node relabelling does not change the embedding") {
  Rng rng(3);
  const Model m = small_model(5, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = testing::random_graph(rng, 2, 20, 5, 0.3);
    std::vector<std::size_t> perm(g.num_nodes);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    shuffle_range(perm.begin(), perm.end(), rng);
    CHECK(max_abs_diff(embed({g}, m), embed({permute_nodes(g, perm)}, m)) <= 1e-9);
  }
}

TEST_CASE("batched encoding equals per-graph encoding") {
  Rng rng(4);
  const Dataset ds = testing::random_dataset(rng, 7, 4);
  const Model m = small_model(4, 4);
  const Tensor all = embed(ds.graphs, m);
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
    const Tensor one = embed({ds.graphs[i]}, m);
    for (std::size_t k = 0; k < all.cols(); ++k) CHECK(all(i, k) == doctest::Approx(one(0, k)).epsilon(1e-13));
  }
}

TEST_CASE("feature width mismatch is rejected") {
  Rng rng(5);
  const Dataset ds = testing::random_dataset(rng, 2, 4);
  const Model m = small_model(6, 5);
  CHECK_THROWS_AS(embed(ds.graphs, m), ShapeError);
}

TEST_CASE("encoder gradients pass finite differences") {
  Rng rng(6);
  const Dataset ds = testing::random_dataset(rng, 3, 3);
  const Batch b = collate(std::span<const Graph>(ds.graphs));
  const EncoderConfig cfg{3, 4, 2};
  const ParamSet p = init_encoder(cfg, rng);
  std::vector<Tensor> inputs;
  for (const auto& nt : p) inputs.push_back(nt.value);
  // Random biases so ReLU kinks sit away from the evaluation point.
  for (auto& t : inputs)
    if (t.rows() == 1) t = testing::random_tensor(rng, 1, t.cols(), -0.3, 0.3);
  testing::Builder f = [&](Tape& t, const std::vector<Var>& v) {
    return testing::contract(t, encode(b, v, cfg), 99);
  };
  CHECK(testing::gradient_check(f, inputs) <= 1e-5);
}

TEST_CASE("projection head shapes") {
  Rng rng(7);
  const ParamSet head = init_head({96, 512, 512}, "drin", rng);
  CHECK(infer_head_config(head).hidden == 512);
  Tape t;
  const Var z = project(t.leaf(Tensor::zeros(3, 96)), head.bind(t, false));
  CHECK(z.rows() == 3);
  CHECK(z.cols() == 512);
}

TEST_CASE("checkpoint round trip is exact") {
  const Model m = small_model(7, 8);
  const fs::path file = fs::temp_directory_path() / ("drgcl-ckpt-" + std::to_string(::getpid()));
  save_model(file, m);
  const Model back = load_model(file);
  fs::remove(file);
  CHECK(back.encoder_config.input_dim == 7);
  CHECK(back.encoder_config.layers == 3);
  REQUIRE(back.encoder.size() == m.encoder.size());
  for (std::size_t i = 0; i < m.encoder.size(); ++i) {
    CHECK(back.encoder[i].name == m.encoder[i].name);
    CHECK(back.encoder[i].value == m.encoder[i].value);
  }
  CHECK(back.rr_head[0].value == m.rr_head[0].value);
  CHECK_THROWS(load_model(file));
}
