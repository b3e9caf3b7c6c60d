// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the unit tests and the acceptance binary: random
// fixtures, finite-difference checks and literal double-loop oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "drgcl/autodiff/ops.hpp"
#include "drgcl/graph/batch.hpp"
#include "drgcl/objectives/losses.hpp"
#include "drgcl/train/trainer.hpp"
#include "drgcl/util/rng.hpp"

namespace drgcl::testing {

inline Tensor random_tensor(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                            double hi = 1.0) {
  Tensor t({rows, cols});
  for (double& v : t.data()) v = uniform_real(rng, lo, hi);
  return t;
}

// Values with |v| in [lo, hi] and a random sign.
inline Tensor random_away_from_zero(Rng& rng, std::size_t rows, std::size_t cols, double lo,
                                    double hi) {
  Tensor t = random_tensor(rng, rows, cols, lo, hi);
  for (double& v : t.data())
    if (uniform_unit(rng) < 0.5) v = -v;
  return t;
}

inline Graph random_graph(Rng& rng, std::size_t min_nodes, std::size_t max_nodes,
                          std::size_t feature_dim, double edge_prob, std::size_t label = 0) {
  Graph g;
  g.num_nodes = min_nodes + uniform_index(rng, max_nodes - min_nodes + 1);
  g.label = label;
  g.node_features = Tensor({g.num_nodes, feature_dim});
  g.node_labels.resize(g.num_nodes);
  for (std::size_t v = 0; v < g.num_nodes; ++v) {
    g.node_labels[v] = static_cast<long>(uniform_index(rng, feature_dim));
    g.node_features(v, static_cast<std::size_t>(g.node_labels[v])) = 1.0;
  }
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < g.num_nodes; ++u)
    for (std::size_t v = u + 1; v < g.num_nodes; ++v)
      if (uniform_unit(rng) < edge_prob) edges.emplace_back(u, v);
  g.edges = canonical_edges(std::move(edges));
  return g;
}

inline Dataset random_dataset(Rng& rng, std::size_t graphs, std::size_t feature_dim,
                              std::size_t min_nodes = 3, std::size_t max_nodes = 9) {
  Dataset ds;
  ds.name = "random";
  ds.num_classes = 2;
  ds.class_values = {0, 1};
  ds.feature_dim = feature_dim;
  for (std::size_t i = 0; i < graphs; ++i)
    ds.graphs.push_back(random_graph(rng, min_nodes, max_nodes, feature_dim, 0.35, i % 2));
  return ds;
}

// max|a - b| / max(|a|_inf, |b|_inf), or the plain difference when both
// gradients are below 1e-8.
inline double relative_error(const Tensor& a, const Tensor& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return scale < 1e-8 ? diff : diff / scale;
}

// Central differences of a scalar function of several tensors.
using ScalarFn = std::function<double(const std::vector<Tensor>&)>;

inline std::vector<Tensor> central_differences(const ScalarFn& f, std::vector<Tensor> x,
                                               double step) {
  std::vector<Tensor> grads;
  for (std::size_t a = 0; a < x.size(); ++a) {
    Tensor g(x[a].shape());
    for (std::size_t i = 0; i < x[a].numel(); ++i) {
      const double keep = x[a][i];
      x[a][i] = keep + step;
      const double up = f(x);
      x[a][i] = keep - step;
      const double down = f(x);
      x[a][i] = keep;
      g[i] = (up - down) / (2.0 * step);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

// A graph-building function over leaf Vars that returns a scalar Var.
using Builder = std::function<Var(Tape&, const std::vector<Var>&)>;

inline double evaluate_builder(const Builder& build, const std::vector<Tensor>& inputs) {
  Tape tape;
  std::vector<Var> leaves;
  for (const Tensor& t : inputs) leaves.push_back(tape.leaf(t));
  return build(tape, leaves).value().item();
}

inline std::vector<Tensor> analytic_gradient(const Builder& build,
                                             const std::vector<Tensor>& inputs) {
  Tape tape;
  std::vector<Var> leaves;
  for (const Tensor& t : inputs) leaves.push_back(tape.leaf(t));
  return backward(tape, build(tape, leaves), leaves);
}

inline double gradient_check(const Builder& build, const std::vector<Tensor>& inputs,
                             double step = 1e-5) {
  const auto analytic = analytic_gradient(build, inputs);
  const auto numeric = central_differences(
      [&](const std::vector<Tensor>& x) { return evaluate_builder(build, x); }, inputs, step);
  double worst = 0.0;
  for (std::size_t a = 0; a < inputs.size(); ++a)
    worst = std::max(worst, relative_error(analytic[a], numeric[a]));
  return worst;
}

// Contracts an op output against fixed random weights so every output
// element contributes a distinct amount to the scalar.
inline Var contract(Tape& tape, Var out, std::uint64_t seed) {
  Rng rng(seed);
  return ops::sum(ops::mul(out, tape.constant(random_tensor(rng, out.rows(), out.cols()))));
}

struct OpCase {
  std::string name;
  // Draws inputs and returns the builder for one random trial.
  std::function<std::pair<Builder, std::vector<Tensor>>(Rng&)> make;
};

inline std::vector<OpCase> op_cases() {
  using namespace ops;
  auto dim = [](Rng& rng) { return 1 + uniform_index(rng, 5); };
  std::vector<OpCase> cases;
  auto binary = [&](std::string name, Var (*op)(Var, Var), bool away) {
    cases.push_back({name, [=](Rng& rng) {
                       const std::size_t r = dim(rng), c = dim(rng);
                       // One trial in three broadcasts a row or a scalar operand.
                       const std::size_t mode = uniform_index(rng, 3);
                       const std::size_t br = mode == 0 ? r : 1, bc = mode == 2 ? 1 : c;
                       Tensor a = random_tensor(rng, r, c);
                       Tensor b = away ? random_away_from_zero(rng, br, bc, 0.5, 2.0)
                                       : random_tensor(rng, br, bc);
                       const std::uint64_t s = rng();
                       Builder f = [=](Tape& t, const std::vector<Var>& v) {
                         return contract(t, op(v[0], v[1]), s);
                       };
                       return std::pair{f, std::vector<Tensor>{a, b}};
                     }});
  };
  binary("add", add, false);
  binary("sub", sub, false);
  binary("mul", mul, false);
  binary("div", div, true);

  auto unary = [&](std::string name, std::function<Var(Var)> op, double lo, double hi,
                   bool signed_input) {
    cases.push_back({name, [=](Rng& rng) {
                       const std::size_t r = dim(rng), c = dim(rng);
                       Tensor a = signed_input ? random_away_from_zero(rng, r, c, lo, hi)
                                               : random_tensor(rng, r, c, lo, hi);
                       const std::uint64_t s = rng();
                       Builder f = [=](Tape& t, const std::vector<Var>& v) {
                         return contract(t, op(v[0]), s);
                       };
                       return std::pair{f, std::vector<Tensor>{a}};
                     }});
  };
  unary("transpose", [](Var x) { return transpose(x); }, -1, 1, false);
  unary("relu", [](Var x) { return relu(x); }, 0.05, 2.0, true);
  unary("exp", [](Var x) { return ops::exp(x); }, -2, 2, false);
  unary("log", [](Var x) { return ops::log(x); }, 0.3, 3.0, false);
  unary("sqrt", [](Var x) { return ops::sqrt(x); }, 0.3, 3.0, false);
  unary("power", [](Var x) { return power(x, 2.7); }, 0.3, 2.0, false);
  unary("power_negative", [](Var x) { return power(x, -1.5); }, 0.5, 2.0, false);
  unary("scale", [](Var x) { return scale(x, -1.7); }, -1, 1, false);
  unary("shift", [](Var x) { return shift(x, 0.4); }, -1, 1, false);
  unary("clamp_min", [](Var x) { return clamp_min(x, 0.0); }, 0.05, 2.0, true);
  unary("sum", [](Var x) { return ops::sum(ops::mul(x, x)); }, -1, 1, false);
  unary("sum_rows", [](Var x) { return sum_rows(x); }, -1, 1, false);
  unary("sum_cols", [](Var x) { return sum_cols(x); }, -1, 1, false);
  unary("mean", [](Var x) { return ops::mul(mean(x), mean(x)); }, -1, 1, false);
  unary("mean_rows", [](Var x) { return mean_rows(x); }, -1, 1, false);

  cases.push_back({"matmul", [=](Rng& rng) {
                     const std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
                     const std::uint64_t s = rng();
                     Builder f = [=](Tape& t, const std::vector<Var>& v) {
                       return contract(t, matmul(v[0], v[1]), s);
                     };
                     return std::pair{f, std::vector<Tensor>{random_tensor(rng, m, k),
                                                             random_tensor(rng, k, n)}};
                   }});
  cases.push_back({"concat", [=](Rng& rng) {
                     const std::size_t r = dim(rng);
                     std::vector<Tensor> parts;
                     for (std::size_t p = 0; p < 1 + uniform_index(rng, 3); ++p)
                       parts.push_back(random_tensor(rng, r, dim(rng)));
                     const std::uint64_t s = rng();
                     Builder f = [=](Tape& t, const std::vector<Var>& v) {
                       return contract(t, concat_cols(v), s);
                     };
                     return std::pair{f, parts};
                   }});
  cases.push_back({"slice", [=](Rng& rng) {
                     const std::size_t r = dim(rng), c = 1 + dim(rng);
                     const std::size_t b = uniform_index(rng, c);
                     const std::size_t e = b + 1 + uniform_index(rng, c - b);
                     const std::uint64_t s = rng();
                     Builder f = [=](Tape& t, const std::vector<Var>& v) {
                       return contract(t, slice_cols(v[0], b, e), s);
                     };
                     return std::pair{f, std::vector<Tensor>{random_tensor(rng, r, c)}};
                   }});
  cases.push_back({"broadcast", [=](Rng& rng) {
                     const std::size_t r = dim(rng), c = dim(rng);
                     const bool row = uniform_index(rng, 2) == 0;
                     const std::uint64_t s = rng();
                     Builder f = [=](Tape& t, const std::vector<Var>& v) {
                       return contract(t, broadcast(v[0], Shape{r, c}), s);
                     };
                     return std::pair{f,
                                      std::vector<Tensor>{random_tensor(rng, 1, row ? c : 1)}};
                   }});
  cases.push_back({"rowsum_by_segment", [=](Rng& rng) {
                     const std::size_t r = dim(rng) + 2, c = dim(rng), segs = 1 + uniform_index(rng, 3);
                     std::vector<std::size_t> seg(r);
                     for (auto& x : seg) x = uniform_index(rng, segs);
                     std::sort(seg.begin(), seg.end());
                     const std::uint64_t s = rng();
                     Builder f = [=](Tape& t, const std::vector<Var>& v) {
                       return contract(t, rowsum_by_segment(v[0], make_index(seg), segs), s);
                     };
                     return std::pair{f, std::vector<Tensor>{random_tensor(rng, r, c)}};
                   }});
  cases.push_back({"gather_rows", [=](Rng& rng) {
                     const std::size_t r = dim(rng), c = dim(rng), out = dim(rng) + 1;
                     std::vector<std::size_t> idx(out);
                     for (auto& x : idx) x = uniform_index(rng, r);
                     const std::uint64_t s = rng();
                     Builder f = [=](Tape& t, const std::vector<Var>& v) {
                       return contract(t, gather_rows(v[0], make_index(idx)), s);
                     };
                     return std::pair{f, std::vector<Tensor>{random_tensor(rng, r, c)}};
                   }});
  return cases;
}

struct OpSuiteResult {
  std::string op;
  double worst = 0.0;
  std::size_t failures = 0;
};

inline std::vector<OpSuiteResult> run_op_suite(std::size_t trials, double tolerance,
                                               std::uint64_t seed) {
  std::vector<OpSuiteResult> out;
  for (const OpCase& c : op_cases()) {
    Rng rng = make_rng(seed, c.name);
    OpSuiteResult r{c.name};
    for (std::size_t t = 0; t < trials; ++t) {
      auto [build, inputs] = c.make(rng);
      const double err = gradient_check(build, inputs);
      r.worst = std::max(r.worst, err);
      r.failures += !(err <= tolerance);
    }
    out.push_back(r);
  }
  return out;
}

// ---- meta gradient against finite differences of the composed objective ----

struct MetaFixture {
  Dataset dataset;
  RunConfig config;
  TrainState state;
  ViewBatch views;
};

// One GIN layer of width 4 (D = 4), four graphs, small heads. R is drawn
// strictly inside (0, 1) so the clamp is inactive.
inline MetaFixture meta_fixture(std::uint64_t seed) {
  MetaFixture fx;
  Rng rng = make_rng(seed, "meta-fixture");
  fx.dataset = random_dataset(rng, 4, 3, 3, 6);
  fx.config.gin_hidden = 4;
  fx.config.gin_layers = 1;
  fx.config.proj_hidden = 6;
  fx.config.proj_out = 5;
  fx.config.tau = 0.5;
  fx.config.pretrain_lr = 0.05;
  fx.config.meta_lr = 0.01;
  fx.config.seed = seed;
  fx.state = init_state(fx.dataset.feature_dim, fx.config);
  std::vector<double> r(4);
  for (double& w : r) w = uniform_real(rng, 0.2, 0.9);
  fx.state.r = DRWeight(r);
  std::vector<std::size_t> members{0, 1, 2, 3};
  fx.views = sample_views(fx.dataset, members, 0.2, rng);
  return fx;
}

// L_DRIN(theta - beta grad_theta, vartheta - beta grad_vartheta; omega),
// the inner gradient taken at omega too, evaluated with plain tensors.
inline double composed_meta_objective(const MetaFixture& fx, const Tensor& omega) {
  const LossSettings settings = loss_settings(fx.config);
  const double beta = fx.config.trial_rate();
  std::vector<Tensor> enc, head;
  {
    Tape tape;
    const auto e = fx.state.model.encoder.bind(tape);
    const auto h = fx.state.model.drin_head.bind(tape);
    const Var w = tape.constant(omega);
    const Var loss = drin_loss(fx.views.view_i, fx.views.view_j, fx.state.model.encoder_config,
                               e, h, w, settings);
    std::vector<Var> wrt(e);
    wrt.insert(wrt.end(), h.begin(), h.end());
    const auto g = tape.gradient(loss, wrt);
    for (std::size_t i = 0; i < wrt.size(); ++i) {
      Tensor stepped = wrt[i].value();
      for (std::size_t k = 0; k < stepped.numel(); ++k) stepped[k] -= beta * g[i][k];
      (i < e.size() ? enc : head).push_back(std::move(stepped));
    }
  }
  Tape tape;
  std::vector<Var> e, h;
  for (const Tensor& t : enc) e.push_back(tape.constant(t));
  for (const Tensor& t : head) h.push_back(tape.constant(t));
  return drin_loss(fx.views.view_i, fx.views.view_j, fx.state.model.encoder_config, e, h,
                   tape.constant(omega), settings)
      .value()
      .item();
}

struct MetaCheck {
  Tensor analytic;
  Tensor numeric;
  double relative = 0.0;
};

inline MetaCheck meta_gradient_check(std::uint64_t seed, double step = 1e-5) {
  MetaFixture fx = meta_fixture(seed);
  const Tensor omega = fx.state.r.effective_row();
  TrialWeights trial = trial_weights(fx.state, fx.views, fx.config);
  const MetaResult meta = meta_step(fx.state, trial, fx.views, fx.config);
  MetaCheck out;
  out.analytic = Tensor({1, omega.cols()}, meta.gradient);
  out.numeric = central_differences(
                    [&](const std::vector<Tensor>& x) { return composed_meta_objective(fx, x[0]); },
                    {omega}, step)
                    .front();
  out.relative = relative_error(out.analytic, out.numeric);
  return out;
}

// ---- literal double-loop oracles ----

inline double row_norm(const Tensor& z, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < z.cols(); ++k) s += z(n, k) * z(n, k);
  return std::sqrt(std::max(s, 1e-12));
}

inline double brute_infonce(const Tensor& zi, const Tensor& zj, double tau,
                            bool include_positive = false) {
  const std::size_t n = zi.rows(), d = zi.cols();
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double denom = 0.0, positive = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += zi(a, k) * zj(b, k);
      const double s = dot / (row_norm(zi, a) * row_norm(zj, b)) / tau;
      if (a == b) positive = s;
      if (a != b || include_positive) denom += std::exp(s);
    }
    total += -(positive - std::log(std::max(denom, 1e-12)));
  }
  return total;
}

inline Tensor brute_normalize(const Tensor& z) {
  const std::size_t n = z.rows(), d = z.cols();
  Tensor out({n, d});
  for (std::size_t k = 0; k < d; ++k) {
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += z(i, k);
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (z(i, k) - mu) * (z(i, k) - mu);
    var /= static_cast<double>(n);
    const double sigma = std::sqrt(std::max(var, 1e-12));
    for (std::size_t i = 0; i < n; ++i)
      out(i, k) = (z(i, k) - mu) / (sigma * std::sqrt(static_cast<double>(n)) + 1e-12);
  }
  return out;
}

inline std::pair<double, double> brute_rr(const Tensor& zi, const Tensor& zj) {
  const std::size_t n = zi.rows(), d = zi.cols();
  double inv = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) inv += (zi(i, k) - zj(i, k)) * (zi(i, k) - zj(i, k));
  double dec = 0.0;
  for (const Tensor* z : {&zi, &zj})
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t l = 0; l < d; ++l) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += (*z)(i, k) * (*z)(i, l);
        const double e = c - (k == l ? 1.0 : 0.0);
        dec += e * e;
      }
  return {inv, dec};
}

// Shifted-data variance: exact zero for a constant column.
inline double column_variance(const Tensor& h, std::span<const std::size_t> rows, std::size_t k) {
  const double origin = h(rows[0], k);
  double s = 0.0, s2 = 0.0;
  for (std::size_t r : rows) {
    const double d = h(r, k) - origin;
    s += d;
    s2 += d * d;
  }
  const double n = static_cast<double>(rows.size());
  return std::max(0.0, s2 / n - (s / n) * (s / n));
}

}  // namespace drgcl::testing
