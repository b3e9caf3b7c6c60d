// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "drgcl/autodiff/tape.hpp"

namespace drgcl::ops {

// Elementwise binary ops accept equal shapes, a 1x1 scalar against any
// shape, or a 1xC row against an RxC matrix. Anything else is a ShapeError.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
// a / (b + 1e-12), for denominators that can legitimately vanish
// (standard deviations of constant columns).
Var div_guarded(Var a, Var b);

Var matmul(Var a, Var b);
Var transpose(Var x);
Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var x, std::size_t begin, std::size_t end);

Var sum(Var x);       // -> 1x1
Var sum_rows(Var x);  // RxC -> 1xC
Var sum_cols(Var x);  // RxC -> Rx1
Var mean(Var x);      // -> 1x1
Var mean_rows(Var x); // RxC -> 1xC

Var relu(Var x);
Var exp(Var x);
Var log(Var x);   // argument clamped to >= 1e-12
Var sqrt(Var x);  // argument clamped to >= 1e-12
Var power(Var x, double exponent);
Var broadcast(Var x, const Shape& target);

// out[s] = sum of rows r with segments[r] == s, for s < num_segments.
Var rowsum_by_segment(Var rows, IndexList segments, std::size_t num_segments);
// out[i] = x[index[i]]
Var gather_rows(Var x, IndexList index);

Var scale(Var x, double factor);
Var shift(Var x, double offset);
Var clamp_min(Var x, double floor);
Var neg(Var x);

inline constexpr double kLogSqrtFloor = 1e-12;
inline constexpr double kVarianceEps = 1e-12;

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator/(Var a, Var b) { return div(a, b); }
inline Var operator*(Var a, double c) { return scale(a, c); }
inline Var operator*(double c, Var a) { return scale(a, c); }
inline Var operator-(Var a) { return neg(a); }

IndexList make_index(std::vector<std::size_t> ids);

}  // namespace drgcl::ops
