// SPDX-License-Identifier: Apache-2.0
#include "drgcl/model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "drgcl/util/error.hpp"

namespace drgcl {
namespace {

constexpr const char* kMagic = "drgcl-params";

void put_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double get_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw DataError("parameter file: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

std::string next_line(std::istream& in, const std::filesystem::path& file) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(file.string() + ": truncated header");
  return line;
}

}  // namespace

void save_params(const std::filesystem::path& file, const ParamSet& params) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  out << kMagic << " 1\n";
  out << "tensors " << params.size() << "\n";
  for (const auto& p : params) {
    if (p.name.find_first_of(" \t\n") != std::string::npos)
      throw DataError("parameter name contains whitespace: " + p.name);
    out << p.name << " " << p.value.rows() << " " << p.value.cols() << "\n";
  }
  out << "payload " << params.scalar_count() * 8 << "\n";
  for (const auto& p : params)
    for (double v : p.value.data()) put_le(out, v);
  if (!out) throw DataError("failed writing " + file.string());
}

ParamSet load_params(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open " + file.string());
  std::string magic;
  int version = 0;
  std::istringstream(next_line(in, file)) >> magic >> version;
  if (magic != kMagic || version != 1) throw DataError(file.string() + ": not a parameter file");
  std::string word;
  std::size_t count = 0;
  std::istringstream(next_line(in, file)) >> word >> count;
  if (word != "tensors") throw DataError(file.string() + ": expected 'tensors <count>'");
  std::vector<std::pair<std::string, Shape>> header;
  std::size_t expected_bytes = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::string name;
    std::size_t r = 0, c = 0;
    std::istringstream ls(next_line(in, file));
    if (!(ls >> name >> r >> c)) throw DataError(file.string() + ": malformed tensor header");
    header.push_back({name, {r, c}});
    expected_bytes += r * c * 8;
  }
  std::size_t bytes = 0;
  std::istringstream(next_line(in, file)) >> word >> bytes;
  if (word != "payload" || bytes != expected_bytes)
    throw DataError(file.string() + ": payload size does not match header");
  ParamSet params;
  for (auto& [name, shape] : header) {
    Tensor t(shape);
    for (auto& v : t.data()) v = get_le(in);
    params.add(name, std::move(t));
  }
  return params;
}

void save_model(const std::filesystem::path& file, const Model& model) {
  ParamSet all;
  for (const auto& p : model.encoder) all.add(p.name, p.value);
  for (const auto& p : model.drin_head) all.add(p.name, p.value);
  for (const auto& p : model.rr_head) all.add(p.name, p.value);
  save_params(file, all);
}

Model load_model(const std::filesystem::path& file) {
  const ParamSet all = load_params(file);
  Model m;
  for (const auto& p : all) {
    if (p.name.rfind("encoder.", 0) == 0) {
      m.encoder.add(p.name, p.value);
    } else if (p.name.rfind("drin.", 0) == 0) {
      m.drin_head.add(p.name, p.value);
    } else if (p.name.rfind("rr.", 0) == 0) {
      m.rr_head.add(p.name, p.value);
    } else {
      throw DataError(file.string() + ": unexpected parameter " + p.name);
    }
  }
  m.encoder_config = infer_encoder_config(m.encoder);
  m.head_config = infer_head_config(m.drin_head);
  if (m.head_config.input_dim != m.encoder_config.output_dim())
    throw ShapeError(file.string() + ": head input width does not match encoder output");
  return m;
}

}  // namespace drgcl
