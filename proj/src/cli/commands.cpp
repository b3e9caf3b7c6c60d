// SPDX-License-Identifier: Apache-2.0
#include "drgcl/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "drgcl/eval/redundancy.hpp"
#include "drgcl/eval/sweep.hpp"
#include "drgcl/graph/tu_format.hpp"
#include "drgcl/model/checkpoint.hpp"
#include "drgcl/train/trainer.hpp"
#include "drgcl/util/error.hpp"
#include "drgcl/version.hpp"

namespace drgcl::cli {

namespace {

using json = nlohmann::ordered_json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
}

void apply_overrides(RunConfig& config, const CommonOptions& options) {
  for (const std::string& kv : options.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (options.seed) config.seed = *options.seed;
  if (options.dataset) config.dataset = *options.dataset;
  if (options.data_dir) config.data_dir = *options.data_dir;
  config.validate();
}

// Runs `body` between a "running" and a final manifest write.
template <class Body>
RunManifest with_manifest(const std::string& command, const RunConfig& config,
                          const fs::path& out, Body&& body) {
  fs::create_directories(out);
  RunManifest m;
  m.command = command;
  m.config_text = to_config_text(config);
  m.seed = config.seed;
  m.started = utc_now();
  m.write(out);
  try {
    body(m);
  } catch (const std::exception& e) {
    m.status = "failed";
    m.error = e.what();
    m.finished = utc_now();
    m.write(out);
    throw;
  }
  m.status = "complete";
  m.finished = utc_now();
  m.write(out);
  return m;
}

json report_json(const CvReport& r, const EmbeddingTable& table) {
  json j;
  j["dataset"] = table.dataset;
  j["checkpoint"] = table.checkpoint_id;
  j["r_applied"] = table.r_applied;
  j["source"] = to_string(table.source);
  j["rows"] = table.rows();
  j["dims"] = table.dims();
  j["mean"] = r.mean;
  j["std"] = r.std;
  j["seed_means"] = r.seed_means;
  j["fold_accuracies"] = r.fold_accuracies;
  j["chosen_c"] = r.chosen_c;
  j["fold_seeds"] = r.fold_seeds;
  return j;
}

void write_fold_csv(const fs::path& file, const CvReport& r) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << "seed,fold,accuracy,c\n";
  char buf[96];
  for (std::size_t s = 0; s < r.fold_accuracies.size(); ++s)
    for (std::size_t f = 0; f < r.fold_accuracies[s].size(); ++f) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", s, f, r.fold_accuracies[s][f],
                    r.chosen_c[s][f]);
      out << buf;
    }
}

RunConfig checkpoint_config(const CommonOptions& options, const fs::path& checkpoint) {
  if (options.config_path || !fs::exists(checkpoint / "config.cfg")) return resolve_config(options);
  RunConfig config = load_config_file((checkpoint / "config.cfg").string());
  apply_overrides(config, options);
  return config;
}

EmbeddingTable table_from_checkpoint(const RunConfig& config, const fs::path& checkpoint,
                                     bool apply_r, EmbeddingSource source, std::ostream& log) {
  const Dataset dataset = open_dataset(config, log);
  const Model model = load_model(checkpoint / "params.bin");
  const DRWeight r = load_dr_weight(checkpoint / "r.txt");
  EmbeddingTable table = extract_embeddings(dataset, model, r, apply_r, source);
  table.checkpoint_id = checkpoint.string();
  return table;
}

// Embedding CSV or checkpoint directory.
EmbeddingTable load_input(const CommonOptions& options, const fs::path& input, bool apply_r,
                          EmbeddingSource source, RunConfig& config, std::ostream& log) {
  if (fs::is_directory(input)) {
    config = checkpoint_config(options, input);
    return table_from_checkpoint(config, input, apply_r, source, log);
  }
  config = resolve_config(options);
  return read_embedding_csv(input);
}

struct Arm {
  const char* name;
  bool dr;
  bool rr;
};

constexpr Arm kArms[] = {
    {"full", true, true},
    {"wo_dr", false, true},
    {"wo_rr", true, false},
    {"wo_rr_dr", false, false},
};

}  // namespace

RunConfig resolve_config(const CommonOptions& options) {
  RunConfig config;
  if (options.config_path) config = load_config_file(*options.config_path);
  apply_overrides(config, options);
  return config;
}

Dataset open_dataset(const RunConfig& config, std::ostream& log) {
  std::string root = config.data_dir;
  if (root.empty()) {
    const char* env = std::getenv("DRGCL_DATA_DIR");
    root = env && *env ? env : "data";
  }
  Dataset ds = load_tu_dataset(fs::path(root) / config.dataset, config.dataset);
  if (ds.cleanup.self_loops || ds.cleanup.duplicates)
    log << "warning: " << ds.name << ": dropped " << ds.cleanup.self_loops << " self-loops and "
        << ds.cleanup.duplicates << " duplicate edges\n";
  if (ds.feature_kind != FeatureKind::NodeLabelOneHot)
    log << "warning: " << ds.name << ": no node labels, using " << to_string(ds.feature_kind)
        << " features\n";
  return ds;
}

void RunManifest::write(const fs::path& dir) const {
  json j;
  j["tool"] = "drgcl";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config_text;
  j["artifacts"] = artifacts;
  j["started"] = started;
  j["finished"] = finished;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& file) {
  const json j = json::parse(read_text(file));
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config_text = j.at("config").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  m.started = j.at("started").get<std::string>();
  m.finished = j.at("finished").get<std::string>();
  m.status = j.at("status").get<std::string>();
  if (j.contains("error")) m.error = j.at("error").get<std::string>();
  return m;
}

CvOptions cv_options(const RunConfig& config, std::size_t threads) {
  CvOptions cv;
  cv.folds = config.cv_folds;
  cv.seeds = config.cv_seeds;
  cv.c_grid = config.c_grid;
  cv.seed = config.seed;
  cv.threads = threads;
  return cv;
}

RunManifest cmd_pretrain(const CommonOptions& options, const fs::path& out, std::ostream& log) {
  const RunConfig config = resolve_config(options);
  return with_manifest("pretrain", config, out, [&](RunManifest& m) {
    write_text(out / "config.cfg", to_config_text(config));
    m.artifacts["config"] = (out / "config.cfg").string();
    const Dataset dataset = open_dataset(config, log);
    PretrainOptions po;
    po.out_dir = out;
    m.artifacts["metrics"] = (out / "metrics.jsonl").string();
    const TrainState state = pretrain(dataset, config, po);
    const EpochRecord& last = state.history.back();
    log << "pretrain: " << state.history.size() << " epochs, final combined loss "
        << last.loss_combined << ", R mean " << last.r_mean << "\n";
    m.artifacts["params"] = (out / "params.bin").string();
    m.artifacts["r"] = (out / "r.txt").string();
  });
}

RunManifest cmd_eval(const CommonOptions& options, const fs::path& checkpoint, bool apply_r,
                     const fs::path& out, std::ostream& log) {
  const RunConfig config = checkpoint_config(options, checkpoint);
  return with_manifest("eval", config, out, [&](RunManifest& m) {
    const EmbeddingTable table =
        table_from_checkpoint(config, checkpoint, apply_r, EmbeddingSource::Encoder, log);
    write_embedding_csv(out / "embeddings.csv", table);
    m.artifacts["embeddings"] = (out / "embeddings.csv").string();
    const CvReport report = linear_classify_cv(table, cv_options(config, options.threads));
    write_text(out / "cv_report.json", report_json(report, table).dump(2) + "\n");
    write_fold_csv(out / "cv_folds.csv", report);
    m.artifacts["cv_report"] = (out / "cv_report.json").string();
    m.artifacts["cv_folds"] = (out / "cv_folds.csv").string();
    char buf[96];
    std::snprintf(buf, sizeof buf, "eval: accuracy %.2f +- %.2f over %zu seeds\n",
                  100.0 * report.mean, 100.0 * report.std, report.seed_means.size());
    log << buf;
  });
}

RunManifest cmd_sweep(const CommonOptions& options, const fs::path& input, bool apply_r,
                      const fs::path& out, std::ostream& log) {
  RunConfig config;
  const EmbeddingTable table =
      load_input(options, input, apply_r, EmbeddingSource::Encoder, config, log);
  return with_manifest("sweep", config, out, [&](RunManifest& m) {
    SweepOptions so;
    so.rates = config.sweep_rates;
    so.trials_per_rate = config.sweep_trials;
    so.cv = cv_options(config, options.threads);
    Rng rng = make_rng(config.seed, "sweep-dims");
    const auto records = dimension_sweep(table, so, rng);
    write_sweep_csv(out / "sweep.csv", records);
    m.artifacts["sweep"] = (out / "sweep.csv").string();
    std::size_t above = 0, below = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
      above += records[i].accuracy > records[0].accuracy;
      below += records[i].accuracy < records[0].accuracy;
    }
    log << "sweep: baseline " << records[0].accuracy << ", " << above << " trials above, "
        << below << " below\n";
  });
}

RunManifest cmd_analyze(const CommonOptions& options, const fs::path& input, bool apply_r,
                        EmbeddingSource source, const fs::path& out, std::ostream& log) {
  RunConfig config;
  const EmbeddingTable table = load_input(options, input, apply_r, source, config, log);
  return with_manifest("analyze", config, out, [&](RunManifest& m) {
    const RedundancyResult r = redundancy_matrix(table.matrix);
    write_matrix_csv(out / "redundancy.csv", r.correlation);
    write_pgm(out / "redundancy.pgm", r.correlation);
    json summary;
    summary["source"] = to_string(table.source);
    summary["dims"] = table.dims();
    summary["mean_abs_off_diagonal"] = r.mean_abs_off_diagonal;
    write_text(out / "redundancy.json", summary.dump(2) + "\n");
    m.artifacts["matrix"] = (out / "redundancy.csv").string();
    m.artifacts["image"] = (out / "redundancy.pgm").string();
    m.artifacts["summary"] = (out / "redundancy.json").string();
    log << "analyze: mean |off-diagonal correlation| " << r.mean_abs_off_diagonal << "\n";
  });
}

RunManifest cmd_ablate(const CommonOptions& options, const fs::path& out, std::ostream& log) {
  const RunConfig base = resolve_config(options);
  return with_manifest("ablate", base, out, [&](RunManifest& m) {
    std::ostringstream table;
    table << "arm,enable_dr,enable_rr,mean,std\n";
    for (const Arm& arm : kArms) {
      CommonOptions arm_options = options;
      arm_options.sets.push_back(std::string("enable_dr=") + (arm.dr ? "true" : "false"));
      arm_options.sets.push_back(std::string("enable_rr=") + (arm.rr ? "true" : "false"));
      const fs::path dir = out / arm.name;
      log << "ablate: arm " << arm.name << "\n";
      cmd_pretrain(arm_options, dir, log);
      cmd_eval(arm_options, dir, true, dir, log);
      const json report = json::parse(read_text(dir / "cv_report.json"));
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g\n", arm.name, arm.dr, arm.rr,
                    report.at("mean").get<double>(), report.at("std").get<double>());
      table << buf;
      m.artifacts[std::string("arm_") + arm.name] = dir.string();
    }
    write_text(out / "ablation.csv", table.str());
    m.artifacts["ablation"] = (out / "ablation.csv").string();
    log << table.str();
  });
}

}  // namespace drgcl::cli
