// SPDX-License-Identifier: Apache-2.0
#include "drgcl/autodiff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "drgcl/autodiff/ops.hpp"
#include "drgcl/kernels/kernels.hpp"
#include "drgcl/util/error.hpp"

namespace drgcl {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::MatMul: return "matmul";
    case Op::Transpose: return "transpose";
    case Op::ConcatCols: return "concat";
    case Op::SliceCols: return "slice";
    case Op::Sum: return "sum";
    case Op::SumRows: return "sum_rows";
    case Op::Relu: return "relu";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Power: return "power";
    case Op::Broadcast: return "broadcast";
    case Op::RowsumBySegment: return "rowsum_by_segment";
    case Op::GatherRows: return "gather_rows";
    case Op::Scale: return "scale";
    case Op::Shift: return "shift";
    case Op::ClampMin: return "clamp_min";
  }
  return "?";
}

namespace {

void require_rank2(Op op, const Tensor& t) {
  if (t.rank() != 2)
    throw ShapeError(std::string(op_name(op)) + ": expected a rank-2 tensor, got " +
                     shape_str(t.shape()));
}

void require_same(Op op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op_name(op)) + ": shape mismatch " + shape_str(a.shape()) +
                     " vs " + shape_str(b.shape()));
}

template <typename F>
Tensor map_unary(const Tensor& x, F f) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = f(x[i]);
  return out;
}

Tensor transpose_of(const Tensor& x) {
  const std::size_t r = x.rows(), c = x.cols();
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(j, i) = x(i, j);
  return out;
}

}  // namespace

Tensor evaluate(Op op, std::span<const Tensor* const> in, const OpAttrs& attrs) {
  const auto& k = kernels::active();
  for (const Tensor* t : in) require_rank2(op, *t);
  switch (op) {
    case Op::Leaf:
      throw DomainError("evaluate: leaf nodes have no forward rule");
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const Tensor& a = *in[0];
      const Tensor& b = *in[1];
      require_same(op, a, b);
      Tensor out(a.shape());
      const std::size_t n = a.numel();
      if (op == Op::Add) k.add(n, a.raw(), b.raw(), out.raw());
      if (op == Op::Sub) k.sub(n, a.raw(), b.raw(), out.raw());
      if (op == Op::Mul) k.mul(n, a.raw(), b.raw(), out.raw());
      if (op == Op::Div) {
        for (std::size_t i = 0; i < n; ++i) {
          if (b[i] == 0.0) throw DomainError("div: division by exact zero");
          out[i] = a[i] / b[i];
        }
      }
      return out;
    }
    case Op::MatMul: {
      const Tensor& a = *in[0];
      const Tensor& b = *in[1];
      if (a.cols() != b.rows())
        throw ShapeError("matmul: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
      Tensor out({a.rows(), b.cols()});
      k.gemm(a.rows(), b.cols(), a.cols(), a.raw(), b.raw(), out.raw());
      return out;
    }
    case Op::Transpose:
      return transpose_of(*in[0]);
    case Op::ConcatCols: {
      const std::size_t r = in[0]->rows();
      std::size_t total = 0;
      for (const Tensor* t : in) {
        if (t->rows() != r) throw ShapeError("concat: row counts differ");
        total += t->cols();
      }
      Tensor out({r, total});
      std::size_t offset = 0;
      for (const Tensor* t : in) {
        for (std::size_t i = 0; i < r; ++i)
          std::copy_n(t->raw() + i * t->cols(), t->cols(), out.raw() + i * total + offset);
        offset += t->cols();
      }
      return out;
    }
    case Op::SliceCols: {
      const Tensor& x = *in[0];
      if (attrs.begin > attrs.end || attrs.end > x.cols())
        throw ShapeError("slice: columns [" + std::to_string(attrs.begin) + ", " +
                         std::to_string(attrs.end) + ") outside " + shape_str(x.shape()));
      const std::size_t w = attrs.end - attrs.begin;
      Tensor out({x.rows(), w});
      for (std::size_t i = 0; i < x.rows(); ++i)
        std::copy_n(x.raw() + i * x.cols() + attrs.begin, w, out.raw() + i * w);
      return out;
    }
    case Op::Sum: {
      double s = 0.0;
      for (double v : in[0]->data()) s += v;
      return Tensor::scalar(s);
    }
    case Op::SumRows: {
      const Tensor& x = *in[0];
      Tensor out({1, x.cols()});
      for (std::size_t i = 0; i < x.rows(); ++i)
        k.add(x.cols(), out.raw(), x.raw() + i * x.cols(), out.raw());
      return out;
    }
    case Op::Relu:
      return map_unary(*in[0], [](double v) { return v > 0.0 ? v : 0.0; });
    case Op::Exp:
      return map_unary(*in[0], [](double v) { return std::exp(v); });
    case Op::Log:
      return map_unary(*in[0], [](double v) {
        if (!(v > 0.0)) throw DomainError("log: argument must be positive");
        return std::log(v);
      });
    case Op::Sqrt:
      return map_unary(*in[0], [](double v) {
        if (v < 0.0) throw DomainError("sqrt: negative argument");
        return std::sqrt(v);
      });
    case Op::Power: {
      const double p = attrs.scalar;
      return map_unary(*in[0], [p](double v) { return p == 2.0 ? v * v : std::pow(v, p); });
    }
    case Op::Broadcast: {
      const Tensor& x = *in[0];
      const Shape& target = attrs.target;
      if (target.size() != 2) throw ShapeError("broadcast: target must be rank 2");
      Tensor out(target);
      if (x.numel() == 1) {
        std::fill(out.data().begin(), out.data().end(), x[0]);
      } else if (x.rows() == 1 && x.cols() == target[1]) {
        for (std::size_t i = 0; i < target[0]; ++i)
          std::copy_n(x.raw(), x.cols(), out.raw() + i * x.cols());
      } else if (x.shape() == target) {
        return x;
      } else {
        throw ShapeError("broadcast: cannot expand " + shape_str(x.shape()) + " to " +
                         shape_str(target));
      }
      return out;
    }
    case Op::RowsumBySegment: {
      const Tensor& x = *in[0];
      const auto& seg = *attrs.index;
      if (seg.size() != x.rows())
        throw ShapeError("rowsum_by_segment: " + std::to_string(seg.size()) +
                         " segment ids for " + std::to_string(x.rows()) + " rows");
      Tensor out({attrs.count, x.cols()});
      for (std::size_t r = 0; r < seg.size(); ++r) {
        if (seg[r] >= attrs.count) throw DomainError("rowsum_by_segment: segment id out of range");
        k.add(x.cols(), out.raw() + seg[r] * x.cols(), x.raw() + r * x.cols(),
              out.raw() + seg[r] * x.cols());
      }
      return out;
    }
    case Op::GatherRows: {
      const Tensor& x = *in[0];
      const auto& idx = *attrs.index;
      Tensor out({idx.size(), x.cols()});
      for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] >= x.rows()) throw DomainError("gather_rows: row index out of range");
        std::copy_n(x.raw() + idx[r] * x.cols(), x.cols(), out.raw() + r * x.cols());
      }
      return out;
    }
    case Op::Scale: {
      Tensor out(in[0]->shape());
      k.scale(in[0]->numel(), attrs.scalar, in[0]->raw(), out.raw());
      return out;
    }
    case Op::Shift: {
      const double c = attrs.scalar;
      return map_unary(*in[0], [c](double v) { return v + c; });
    }
    case Op::ClampMin: {
      const double f = attrs.scalar;
      return map_unary(*in[0], [f](double v) { return v < f ? f : v; });
    }
  }
  throw DomainError("evaluate: unknown op");
}

bool Var::valid() const {
  if (!tape_) return false;
  return id_ < tape_->size() && tape_->node_serial_matches(id_, serial_);
}

bool Var::requires_grad() const { return tape_->node(*this).requires_grad; }

const Tensor& Var::value() const {
  if (!tape_) throw DomainError("value() of an unbound Var");
  return tape_->value(*this);
}

bool Tape::node_serial_matches(std::uint32_t id, std::uint64_t serial) const {
  return nodes_[id].serial == serial;
}

void Tape::check(Var v) const {
  if (v.tape_ != this) throw DomainError("Var belongs to a different tape");
  if (v.id_ >= nodes_.size() || nodes_[v.id_].serial != v.serial_)
    throw DomainError("Var refers to a node that was not retained on its tape");
}

const Node& Tape::node(Var v) const {
  check(v);
  return nodes_[v.id_];
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  if (!value.all_finite()) throw NumericError("leaf: non-finite value");
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.serial = next_serial_++;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), nodes_.back().serial);
}

Var Tape::record(Op op, std::span<const Var> inputs, OpAttrs attrs) {
  std::vector<const Tensor*> values;
  values.reserve(inputs.size());
  Node n;
  n.op = op;
  for (const Var& v : inputs) {
    check(v);
    values.push_back(&nodes_[v.id_].value);
    n.inputs.push_back(v.id_);
    n.requires_grad = n.requires_grad || nodes_[v.id_].requires_grad;
  }
  n.value = evaluate(op, values, attrs);
  if (!n.value.all_finite())
    throw NumericError(std::string(op_name(op)) + ": produced a non-finite value");
  n.attrs = std::move(attrs);
  n.from_backward = in_backward_;
  n.serial = next_serial_++;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), nodes_.back().serial);
}

void Tape::truncate(std::size_t n) {
  if (n < nodes_.size()) nodes_.resize(n);
}

std::vector<Tensor> Tape::replay() const {
  std::vector<Tensor> out;
  out.reserve(nodes_.size());
  for (const Node& n : nodes_) {
    if (n.op == Op::Leaf) {
      out.push_back(n.value);
      continue;
    }
    std::vector<const Tensor*> values;
    for (auto id : n.inputs) values.push_back(&out[id]);
    out.push_back(evaluate(n.op, values, n.attrs));
  }
  return out;
}

namespace {

// Input adjoints of node `n`, given its output adjoint `g` and the Vars of
// its inputs/output. Entries are left empty for inputs that need none.
std::vector<std::optional<Var>> input_adjoints(const Node& n, Var self, std::span<const Var> in,
                                               Var g, std::span<const char> wanted) {
  using namespace ops;
  std::vector<std::optional<Var>> out(in.size());
  Tape& tape = *g.tape();
  auto want = [&](std::size_t i) { return wanted[i] != 0; };
  switch (n.op) {
    case Op::Leaf:
      break;
    case Op::Add:
      if (want(0)) out[0] = g;
      if (want(1)) out[1] = g;
      break;
    case Op::Sub:
      if (want(0)) out[0] = g;
      if (want(1)) out[1] = neg(g);
      break;
    case Op::Mul:
      if (want(0)) out[0] = mul(g, in[1]);
      if (want(1)) out[1] = mul(g, in[0]);
      break;
    case Op::Div:
      if (want(0)) out[0] = div(g, in[1]);
      if (want(1)) out[1] = neg(div(mul(g, self), in[1]));
      break;
    case Op::MatMul:
      if (want(0)) out[0] = matmul(g, transpose(in[1]));
      if (want(1)) out[1] = matmul(transpose(in[0]), g);
      break;
    case Op::Transpose:
      if (want(0)) out[0] = transpose(g);
      break;
    case Op::ConcatCols: {
      std::size_t offset = 0;
      for (std::size_t i = 0; i < in.size(); ++i) {
        const std::size_t w = in[i].cols();
        if (want(i)) out[i] = slice_cols(g, offset, offset + w);
        offset += w;
      }
      break;
    }
    case Op::SliceCols: {
      if (!want(0)) break;
      const std::size_t r = in[0].rows(), c = in[0].cols();
      std::vector<Var> parts;
      if (n.attrs.begin > 0) parts.push_back(tape.constant(Tensor::zeros(r, n.attrs.begin)));
      parts.push_back(g);
      if (n.attrs.end < c) parts.push_back(tape.constant(Tensor::zeros(r, c - n.attrs.end)));
      out[0] = parts.size() == 1 ? g : concat_cols(parts);
      break;
    }
    case Op::Sum:
    case Op::SumRows:
      if (want(0)) out[0] = broadcast(g, in[0].shape());
      break;
    case Op::Relu: {
      if (!want(0)) break;
      const Tensor& x = in[0].value();
      Tensor mask(x.shape());
      for (std::size_t i = 0; i < x.numel(); ++i) mask[i] = x[i] > 0.0 ? 1.0 : 0.0;
      out[0] = mul(g, tape.constant(std::move(mask)));
      break;
    }
    case Op::Exp:
      if (want(0)) out[0] = mul(g, self);
      break;
    case Op::Log:
      if (want(0)) out[0] = div(g, in[0]);
      break;
    case Op::Sqrt:
      if (want(0)) out[0] = scale(div(g, self), 0.5);
      break;
    case Op::Power: {
      if (!want(0)) break;
      const double p = n.attrs.scalar;
      if (p == 0.0) break;
      if (p == 1.0) {
        out[0] = g;
      } else {
        out[0] = mul(g, scale(power(in[0], p - 1.0), p));
      }
      break;
    }
    case Op::Broadcast: {
      if (!want(0)) break;
      const Shape& src = in[0].shape();
      if (src == n.attrs.target) {
        out[0] = g;
      } else if (shape_numel(src) == 1) {
        out[0] = sum(g);
      } else {
        out[0] = sum_rows(g);
      }
      break;
    }
    case Op::RowsumBySegment:
      if (want(0)) out[0] = gather_rows(g, n.attrs.index);
      break;
    case Op::GatherRows:
      if (want(0)) out[0] = rowsum_by_segment(g, n.attrs.index, in[0].rows());
      break;
    case Op::Scale:
      if (want(0)) out[0] = scale(g, n.attrs.scalar);
      break;
    case Op::Shift:
      if (want(0)) out[0] = g;
      break;
    case Op::ClampMin: {
      if (!want(0)) break;
      const Tensor& x = in[0].value();
      Tensor mask(x.shape());
      for (std::size_t i = 0; i < x.numel(); ++i) mask[i] = x[i] >= n.attrs.scalar ? 1.0 : 0.0;
      out[0] = mul(g, tape.constant(std::move(mask)));
      break;
    }
  }
  return out;
}

}  // namespace

std::vector<Var> Tape::gradient_graph(Var output, std::span<const Var> wrt) {
  check(output);
  for (const Var& w : wrt) check(w);
  if (!nodes_[output.id_].value.is_scalar())
    throw ShapeError("gradient: output must be scalar, got " +
                     shape_str(nodes_[output.id_].value.shape()));

  const std::size_t last = output.id_;
  // reaches[i]: node i is, or depends on, one of the requested Vars.
  std::vector<bool> reaches(last + 1, false);
  for (const Var& w : wrt)
    if (w.id_ <= last) reaches[w.id_] = true;
  for (std::size_t i = 0; i <= last; ++i) {
    if (reaches[i] || !nodes_[i].requires_grad) continue;
    for (auto id : nodes_[i].inputs)
      if (reaches[id]) {
        reaches[i] = true;
        break;
      }
  }

  std::vector<std::optional<Var>> adjoint(last + 1);
  const bool outer = in_backward_;
  in_backward_ = true;
  try {
    if (reaches[last]) adjoint[last] = constant(Tensor::scalar(1.0));
    for (std::size_t i = last + 1; i-- > 0;) {
      if (!adjoint[i] || nodes_[i].op == Op::Leaf || !reaches[i]) continue;
      // Copy what we need: recording below may reallocate nodes_.
      const Node node_copy{nodes_[i].op, nodes_[i].inputs, nodes_[i].attrs, Tensor(),
                           nodes_[i].requires_grad, nodes_[i].from_backward, nodes_[i].serial};
      std::vector<Var> in;
      std::vector<char> wanted;
      for (auto id : node_copy.inputs) {
        in.push_back(Var(this, id, nodes_[id].serial));
        wanted.push_back(reaches[id] && nodes_[id].requires_grad);
      }
      const Var self(this, static_cast<std::uint32_t>(i), node_copy.serial);
      auto grads = input_adjoints(node_copy, self, in, *adjoint[i], wanted);
      for (std::size_t j = 0; j < in.size(); ++j) {
        if (!grads[j]) continue;
        auto& slot = adjoint[node_copy.inputs[j]];
        slot = slot ? ops::add(*slot, *grads[j]) : *grads[j];
      }
    }
  } catch (...) {
    in_backward_ = outer;
    throw;
  }

  std::vector<Var> result;
  result.reserve(wrt.size());
  for (const Var& w : wrt) {
    if (w.id_ <= last && adjoint[w.id_]) {
      result.push_back(*adjoint[w.id_]);
    } else {
      result.push_back(constant(Tensor(nodes_[w.id_].value.shape())));
    }
  }
  in_backward_ = outer;
  return result;
}

std::vector<Tensor> Tape::gradient(Var output, std::span<const Var> wrt) {
  const std::size_t mark = nodes_.size();
  std::vector<Tensor> out;
  try {
    auto vars = gradient_graph(output, wrt);
    out.reserve(vars.size());
    for (const Var& v : vars) out.push_back(nodes_[v.id_].value);
  } catch (...) {
    truncate(mark);
    throw;
  }
  truncate(mark);
  return out;
}

std::vector<Tensor> backward(Tape& tape, Var output, std::span<const Var> wrt) {
  return tape.gradient(output, wrt);
}

Tensor grad_through_grad(Tape& tape, Var meta_output, Var wrt) {
  tape.check(meta_output);
  // meta_output must depend on at least one recorded gradient node.
  std::vector<bool> seen(meta_output.id() + 1, false);
  seen[meta_output.id()] = true;
  bool through_gradient = false;
  for (std::size_t i = meta_output.id() + 1; i-- > 0 && !through_gradient;) {
    if (!seen[i]) continue;
    const Node& n = tape.node_at(i);
    if (n.from_backward) through_gradient = true;
    for (auto id : n.inputs) seen[id] = true;
  }
  if (!through_gradient)
    throw DomainError(
        "grad_through_grad: output does not depend on a retained gradient computation");
  const Var w[] = {wrt};
  return tape.gradient(meta_output, w).front();
}

}  // namespace drgcl
