// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "drgcl/autodiff/tensor.hpp"

namespace drgcl {

enum class Op : std::uint8_t {
  Leaf,
  Add,
  Sub,
  Mul,
  Div,
  MatMul,
  Transpose,
  ConcatCols,
  SliceCols,
  Sum,
  SumRows,
  Relu,
  Exp,
  Log,
  Sqrt,
  Power,
  Broadcast,
  RowsumBySegment,
  GatherRows,
  Scale,
  Shift,
  ClampMin,
};

std::string_view op_name(Op op);

using IndexList = std::shared_ptr<const std::vector<std::size_t>>;

struct OpAttrs {
  double scalar = 0.0;  // Scale factor, Shift offset, Power exponent, ClampMin floor
  std::size_t begin = 0;  // SliceCols
  std::size_t end = 0;
  std::size_t count = 0;  // RowsumBySegment output rows
  Shape target;           // Broadcast
  IndexList index;        // RowsumBySegment segment ids, GatherRows row ids
};

struct Node {
  Op op = Op::Leaf;
  std::vector<std::uint32_t> inputs;
  OpAttrs attrs;
  Tensor value;
  bool requires_grad = false;
  bool from_backward = false;  // recorded by gradient_graph()
  std::uint64_t serial = 0;
};

class Tape;

// Handle to one node of a Tape. Cheap to copy; only valid while the node it
// names has not been truncated away.
class Var {
 public:
  Var() = default;

  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const;
  bool requires_grad() const;
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id, std::uint64_t serial)
      : tape_(tape), id_(id), serial_(serial) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
  std::uint64_t serial_ = 0;
};

// Records every operation in execution order, so node order is always a
// topological order. Gradients are themselves recorded when requested through
// gradient_graph(), which is what makes gradients of gradients available.
// Confined to one thread.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, bool requires_grad = true);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  // Evaluates `op` on `inputs` and appends the result. Inputs must already
  // have conforming shapes; the public op functions in ops.hpp handle
  // broadcasting before calling this.
  Var record(Op op, std::span<const Var> inputs, OpAttrs attrs = {});

  const Node& node(Var v) const;
  const Tensor& value(Var v) const { return node(v).value; }
  std::size_t size() const { return nodes_.size(); }

  // Drops every node with index >= n. Vars naming dropped nodes become stale.
  void truncate(std::size_t n);

  // d output / d w for each w in `wrt`, as plain tensors. Nodes added while
  // differentiating are removed again before returning.
  std::vector<Tensor> gradient(Var output, std::span<const Var> wrt);

  // Same derivatives, recorded on this tape as differentiable Vars.
  std::vector<Var> gradient_graph(Var output, std::span<const Var> wrt);

  // Re-evaluates every non-leaf node from its recorded inputs.
  std::vector<Tensor> replay() const;

  // Throws DomainError unless `v` names a live node of this tape.
  void check(Var v) const;

  const Node& node_at(std::size_t id) const { return nodes_.at(id); }
  bool node_serial_matches(std::uint32_t id, std::uint64_t serial) const;

 private:
  std::vector<Node> nodes_;
  std::uint64_t next_serial_ = 1;
  bool in_backward_ = false;
};

// Pure forward rule shared by recording and replay.
Tensor evaluate(Op op, std::span<const Tensor* const> inputs, const OpAttrs& attrs);

// Gradients of a scalar `output` with respect to `wrt` (zero tensors for
// non-ancestors).
std::vector<Tensor> backward(Tape& tape, Var output, std::span<const Var> wrt);

// Total derivative of `meta_output` with respect to `wrt` where
// `meta_output` depends on retained gradient Vars (reverse over reverse).
Tensor grad_through_grad(Tape& tape, Var meta_output, Var wrt);

}  // namespace drgcl
