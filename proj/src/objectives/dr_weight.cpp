// SPDX-License-Identifier: Apache-2.0
#include "drgcl/objectives/dr_weight.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "drgcl/util/error.hpp"

namespace drgcl {

double DRWeight::effective(std::size_t k) const { return std::clamp(raw_.at(k), 0.0, 1.0); }

Tensor DRWeight::effective_row() const {
  std::vector<double> w(raw_.size());
  for (std::size_t k = 0; k < raw_.size(); ++k) w[k] = effective(k);
  return Tensor::row(std::move(w));
}

void DRWeight::descend(std::span<const double> grad, double rate) {
  if (grad.size() != raw_.size())
    throw ShapeError("DRWeight::descend: gradient length " + std::to_string(grad.size()) +
                     " != " + std::to_string(raw_.size()));
  for (std::size_t k = 0; k < raw_.size(); ++k) {
    if (!std::isfinite(grad[k])) throw NumericError("DR weight gradient is not finite");
    raw_[k] -= rate * grad[k];
  }
  clamp();
}

void DRWeight::clamp() {
  for (double& v : raw_) v = std::clamp(v, 0.0, 1.0);
}

DRWeight::Stats DRWeight::stats() const {
  Stats s;
  if (raw_.empty()) return s;
  s.min = 1.0;
  s.max = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < raw_.size(); ++k) {
    const double w = effective(k);
    s.min = std::min(s.min, w);
    s.max = std::max(s.max, w);
    sum += w;
    if (w == 0.0) s.at_zero += 1.0;
    if (w == 1.0) s.at_one += 1.0;
  }
  const auto n = static_cast<double>(raw_.size());
  s.mean = sum / n;
  s.at_zero /= n;
  s.at_one /= n;
  return s;
}

void save_dr_weight(const std::filesystem::path& file, const DRWeight& r) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  char buf[40];
  for (double v : r.raw()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
}

DRWeight load_dr_weight(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::vector<double> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      raw.push_back(std::stod(line, &used));
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw DataError(file.string() + ":" + std::to_string(lineno) + ": expected a number");
    }
  }
  return DRWeight(std::move(raw));
}

}  // namespace drgcl
