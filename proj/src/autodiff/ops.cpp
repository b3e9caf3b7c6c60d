// SPDX-License-Identifier: Apache-2.0
#include "drgcl/autodiff/ops.hpp"

#include <string>

#include "drgcl/util/error.hpp"

namespace drgcl::ops {
namespace {

Tape& tape_of(Var a) {
  if (!a.tape()) throw DomainError("op on an unbound Var");
  return *a.tape();
}

Var unary(Op op, Var x, OpAttrs attrs = {}) {
  const Var in[] = {x};
  return tape_of(x).record(op, in, std::move(attrs));
}

bool expandable(const Shape& from, const Shape& to) {
  if (from == to) return true;
  if (shape_numel(from) == 1) return true;
  return from.size() == 2 && to.size() == 2 && from[0] == 1 && from[1] == to[1];
}

Var binary(Op op, Var a, Var b) {
  if (a.tape() != b.tape()) throw DomainError("operands live on different tapes");
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa != sb) {
    if (shape_numel(sb) <= shape_numel(sa) && expandable(sb, sa)) {
      b = broadcast(b, sa);
    } else if (expandable(sa, sb)) {
      a = broadcast(a, sb);
    } else {
      throw ShapeError(std::string(op_name(op)) + ": cannot combine " + shape_str(sa) + " and " +
                       shape_str(sb));
    }
  }
  const Var in[] = {a, b};
  return tape_of(a).record(op, in);
}

}  // namespace

IndexList make_index(std::vector<std::size_t> ids) {
  return std::make_shared<const std::vector<std::size_t>>(std::move(ids));
}

Var add(Var a, Var b) { return binary(Op::Add, a, b); }
Var sub(Var a, Var b) { return binary(Op::Sub, a, b); }
Var mul(Var a, Var b) { return binary(Op::Mul, a, b); }
Var div(Var a, Var b) { return binary(Op::Div, a, b); }
Var div_guarded(Var a, Var b) { return div(a, shift(b, kVarianceEps)); }

Var matmul(Var a, Var b) {
  const Var in[] = {a, b};
  return tape_of(a).record(Op::MatMul, in);
}

Var transpose(Var x) { return unary(Op::Transpose, x); }

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  return tape_of(parts.front()).record(Op::ConcatCols, parts);
}

Var slice_cols(Var x, std::size_t begin, std::size_t end) {
  OpAttrs a;
  a.begin = begin;
  a.end = end;
  return unary(Op::SliceCols, x, std::move(a));
}

Var sum(Var x) { return unary(Op::Sum, x); }
Var sum_rows(Var x) { return unary(Op::SumRows, x); }
Var sum_cols(Var x) { return transpose(sum_rows(transpose(x))); }
Var mean(Var x) { return scale(sum(x), 1.0 / static_cast<double>(x.value().numel())); }
Var mean_rows(Var x) { return scale(sum_rows(x), 1.0 / static_cast<double>(x.rows())); }

Var relu(Var x) { return unary(Op::Relu, x); }
Var exp(Var x) { return unary(Op::Exp, x); }
Var log(Var x) { return unary(Op::Log, clamp_min(x, kLogSqrtFloor)); }
Var sqrt(Var x) { return unary(Op::Sqrt, clamp_min(x, kLogSqrtFloor)); }

Var power(Var x, double exponent) {
  OpAttrs a;
  a.scalar = exponent;
  return unary(Op::Power, x, std::move(a));
}

Var broadcast(Var x, const Shape& target) {
  if (x.shape() == target) return x;
  if (!expandable(x.shape(), target))
    throw ShapeError("broadcast: cannot expand " + shape_str(x.shape()) + " to " +
                     shape_str(target));
  OpAttrs a;
  a.target = target;
  return unary(Op::Broadcast, x, std::move(a));
}

Var rowsum_by_segment(Var rows, IndexList segments, std::size_t num_segments) {
  OpAttrs a;
  a.index = std::move(segments);
  a.count = num_segments;
  return unary(Op::RowsumBySegment, rows, std::move(a));
}

Var gather_rows(Var x, IndexList index) {
  OpAttrs a;
  a.index = std::move(index);
  return unary(Op::GatherRows, x, std::move(a));
}

Var scale(Var x, double factor) {
  OpAttrs a;
  a.scalar = factor;
  return unary(Op::Scale, x, std::move(a));
}

Var shift(Var x, double offset) {
  OpAttrs a;
  a.scalar = offset;
  return unary(Op::Shift, x, std::move(a));
}

Var clamp_min(Var x, double floor) {
  OpAttrs a;
  a.scalar = floor;
  return unary(Op::ClampMin, x, std::move(a));
}

Var neg(Var x) { return scale(x, -1.0); }

}  // namespace drgcl::ops
