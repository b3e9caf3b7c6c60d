// SPDX-License-Identifier: Apache-2.0
#include "drgcl/train/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "drgcl/util/error.hpp"

namespace drgcl {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dataset", [](RunConfig& c, auto&, auto& v) { c.dataset = v; }},
      {"data_dir", [](RunConfig& c, auto&, auto& v) { c.data_dir = v; }},
      {"batch_size", [](RunConfig& c, auto& k, auto& v) { c.batch_size = to_uint(k, v); }},
      {"epochs", [](RunConfig& c, auto& k, auto& v) { c.epochs = to_uint(k, v); }},
      {"pretrain_lr", [](RunConfig& c, auto& k, auto& v) { c.pretrain_lr = to_double(k, v); }},
      {"meta_lr", [](RunConfig& c, auto& k, auto& v) { c.meta_lr = to_double(k, v); }},
      {"trial_lr",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "none") c.trial_lr.reset();
         else c.trial_lr = to_double(k, v);
       }},
      {"tau", [](RunConfig& c, auto& k, auto& v) { c.tau = to_double(k, v); }},
      {"lambda", [](RunConfig& c, auto& k, auto& v) { c.lambda = to_double(k, v); }},
      {"alpha", [](RunConfig& c, auto& k, auto& v) { c.alpha = to_double(k, v); }},
      {"aug_ratio", [](RunConfig& c, auto& k, auto& v) { c.aug_ratio = to_double(k, v); }},
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_uint(k, v); }},
      {"enable_dr", [](RunConfig& c, auto& k, auto& v) { c.enable_dr = to_bool(k, v); }},
      {"enable_rr", [](RunConfig& c, auto& k, auto& v) { c.enable_rr = to_bool(k, v); }},
      {"fixed_R",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "none") {
           c.fixed_r.reset();
         } else {
           c.fixed_r = to_double(k, v);
           c.enable_dr = false;
         }
       }},
      {"shuffle", [](RunConfig& c, auto& k, auto& v) { c.shuffle = to_bool(k, v); }},
      {"inclusive_infonce",
       [](RunConfig& c, auto& k, auto& v) { c.inclusive_infonce = to_bool(k, v); }},
      {"first_order_meta",
       [](RunConfig& c, auto& k, auto& v) { c.first_order_meta = to_bool(k, v); }},
      {"gin_hidden", [](RunConfig& c, auto& k, auto& v) { c.gin_hidden = to_uint(k, v); }},
      {"gin_layers", [](RunConfig& c, auto& k, auto& v) { c.gin_layers = to_uint(k, v); }},
      {"proj_hidden", [](RunConfig& c, auto& k, auto& v) { c.proj_hidden = to_uint(k, v); }},
      {"proj_out", [](RunConfig& c, auto& k, auto& v) { c.proj_out = to_uint(k, v); }},
      {"cv_folds", [](RunConfig& c, auto& k, auto& v) { c.cv_folds = to_uint(k, v); }},
      {"cv_seeds", [](RunConfig& c, auto& k, auto& v) { c.cv_seeds = to_uint(k, v); }},
      {"c_grid", [](RunConfig& c, auto& k, auto& v) { c.c_grid = to_list(k, v); }},
      {"sweep_rates", [](RunConfig& c, auto& k, auto& v) { c.sweep_rates = to_list(k, v); }},
      {"sweep_trials", [](RunConfig& c, auto& k, auto& v) { c.sweep_trials = to_uint(k, v); }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
  };
  positive("pretrain_lr", pretrain_lr);
  positive("meta_lr", meta_lr);
  if (trial_lr) positive("trial_lr", *trial_lr);
  positive("tau", tau);
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (!(aug_ratio >= 0.0 && aug_ratio <= 1.0)) throw ConfigError("aug_ratio must lie in [0, 1]");
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  if (gin_hidden == 0 || gin_layers == 0 || proj_hidden == 0 || proj_out == 0)
    throw ConfigError("network widths must be positive");
  if (fixed_r && enable_dr) throw ConfigError("fixed_R requires enable_dr = false");
  if (fixed_r && !(*fixed_r >= 0.0 && *fixed_r <= 1.0))
    throw ConfigError("fixed_R must lie in [0, 1]");
  if (cv_folds < 2) throw ConfigError("cv_folds must be at least 2");
  if (cv_seeds < 1) throw ConfigError("cv_seeds must be at least 1");
  for (double c : c_grid) positive("c_grid entries", c);
  for (double r : sweep_rates)
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("sweep_rates must lie in (0, 1]");
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
  it->second(config, key, trim(value));
}

void apply_config_text(RunConfig& config, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig config;
  apply_config_text(config, ss.str(), path);
  return config;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  const auto b = [](bool v) { return v ? "true" : "false"; };
  o << "dataset = " << c.dataset << "\n";
  o << "data_dir = " << c.data_dir << "\n";
  o << "batch_size = " << c.batch_size << "\n";
  o << "epochs = " << c.epochs << "\n";
  o << "pretrain_lr = " << fmt(c.pretrain_lr) << "\n";
  o << "meta_lr = " << fmt(c.meta_lr) << "\n";
  o << "trial_lr = " << (c.trial_lr ? fmt(*c.trial_lr) : "none") << "\n";
  o << "tau = " << fmt(c.tau) << "\n";
  o << "lambda = " << fmt(c.lambda) << "\n";
  o << "alpha = " << fmt(c.alpha) << "\n";
  o << "aug_ratio = " << fmt(c.aug_ratio) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "fixed_R = " << (c.fixed_r ? fmt(*c.fixed_r) : "none") << "\n";
  o << "enable_dr = " << b(c.enable_dr) << "\n";
  o << "enable_rr = " << b(c.enable_rr) << "\n";
  o << "shuffle = " << b(c.shuffle) << "\n";
  o << "inclusive_infonce = " << b(c.inclusive_infonce) << "\n";
  o << "first_order_meta = " << b(c.first_order_meta) << "\n";
  o << "gin_hidden = " << c.gin_hidden << "\n";
  o << "gin_layers = " << c.gin_layers << "\n";
  o << "proj_hidden = " << c.proj_hidden << "\n";
  o << "proj_out = " << c.proj_out << "\n";
  o << "cv_folds = " << c.cv_folds << "\n";
  o << "cv_seeds = " << c.cv_seeds << "\n";
  o << "c_grid = " << fmt_list(c.c_grid) << "\n";
  o << "sweep_rates = " << fmt_list(c.sweep_rates) << "\n";
  o << "sweep_trials = " << c.sweep_trials << "\n";
  return o.str();
}

}  // namespace drgcl
