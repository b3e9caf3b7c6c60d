// SPDX-License-Identifier: Apache-2.0
#include "drgcl/eval/redundancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "drgcl/util/error.hpp"

namespace drgcl {

RedundancyResult redundancy_matrix(const Tensor& table) {
  const std::size_t m = table.rows(), d = table.cols();
  if (m < 2) throw DomainError("redundancy_matrix: need at least 2 rows");
  Tensor z({m, d});
  std::vector<char> constant(d, 0);
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += table(i, k);
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) ss += (table(i, k) - mean) * (table(i, k) - mean);
    const double norm = std::sqrt(ss);
    constant[k] = !(norm > 1e-12 * (1.0 + std::abs(mean)) * std::sqrt(static_cast<double>(m)));
    for (std::size_t i = 0; i < m; ++i) z(i, k) = constant[k] ? 0.0 : (table(i, k) - mean) / norm;
  }

  RedundancyResult out;
  out.correlation = Tensor({d, d});
  double off = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    if (!constant[a]) out.correlation(a, a) = 1.0;
    for (std::size_t b = a + 1; b < d; ++b) {
      double c = 0.0;
      if (!constant[a] && !constant[b]) {
        for (std::size_t i = 0; i < m; ++i) c += z(i, a) * z(i, b);
        c = std::min(1.0, std::abs(c));
      }
      out.correlation(a, b) = out.correlation(b, a) = c;
      off += 2.0 * c;
    }
  }
  if (d > 1) out.mean_abs_off_diagonal = off / static_cast<double>(d * (d - 1));
  return out;
}

void write_matrix_csv(const std::filesystem::path& file, const Tensor& m) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  char buf[40];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

void write_pgm(const std::filesystem::path& file, const Tensor& correlation) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << "P2\n" << correlation.cols() << " " << correlation.rows() << "\n255\n";
  for (std::size_t i = 0; i < correlation.rows(); ++i) {
    for (std::size_t j = 0; j < correlation.cols(); ++j) {
      const double c = std::clamp(correlation(i, j), 0.0, 1.0);
      out << (j ? " " : "") << static_cast<int>(std::lround(255.0 * (1.0 - c)));
    }
    out << "\n";
  }
}

}  // namespace drgcl
