// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drgcl/eval/cross_validation.hpp"
#include "drgcl/eval/embeddings.hpp"
#include "drgcl/train/config.hpp"

namespace drgcl::cli {

namespace fs = std::filesystem;

// Flags shared by every subcommand. Precedence: config file, then --set in
// order, then the dedicated flags (--seed, --dataset, --data-dir).
struct CommonOptions {
  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dataset;
  std::optional<std::string> data_dir;
  std::size_t threads = 0;
};

RunConfig resolve_config(const CommonOptions& options);

// data_dir falls back to $DRGCL_DATA_DIR, then "data". Cleanup counts and
// the degree-feature fallback are reported on `log`.
Dataset open_dataset(const RunConfig& config, std::ostream& log);

// Written as manifest.json in the output directory: once with status
// "running" and again with "complete" or "failed".
struct RunManifest {
  std::string command;
  std::string config_text;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> artifacts;
  std::string started;
  std::string finished;
  std::string status = "running";
  std::string error;

  void write(const fs::path& dir) const;
};

RunManifest read_manifest(const fs::path& file);

CvOptions cv_options(const RunConfig& config, std::size_t threads);

// Each returns the manifest it wrote into `out`.
RunManifest cmd_pretrain(const CommonOptions& options, const fs::path& out, std::ostream& log);

// `checkpoint` is a pretrain output directory (params.bin + r.txt). Its
// config.cfg is the base config when no --config is given.
RunManifest cmd_eval(const CommonOptions& options, const fs::path& checkpoint, bool apply_r,
                     const fs::path& out, std::ostream& log);

// Input is either an embedding CSV or a checkpoint directory.
RunManifest cmd_sweep(const CommonOptions& options, const fs::path& input, bool apply_r,
                      const fs::path& out, std::ostream& log);
RunManifest cmd_analyze(const CommonOptions& options, const fs::path& input, bool apply_r,
                        EmbeddingSource source, const fs::path& out, std::ostream& log);

// Full DRGCL plus the w/o DR, w/o RR and w/o RR & DR arms, each pretrained
// and evaluated under out/<arm>/, then compared in out/ablation.csv.
RunManifest cmd_ablate(const CommonOptions& options, const fs::path& out, std::ostream& log);

}  // namespace drgcl::cli
