// SPDX-License-Identifier: Apache-2.0
// drgcl: pretrain, evaluate, sweep, analyze and ablate from the command line.
#include <iostream>

#include <CLI11.hpp>

#include "drgcl/cli/commands.hpp"
#include "drgcl/util/error.hpp"
#include "drgcl/version.hpp"

namespace {

void add_common(CLI::App* cmd, drgcl::cli::CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value config file");
  cmd->add_option("--set", o.sets, "override one key, KEY=VALUE (repeatable)")
      ->allow_extra_args(false);
  cmd->add_option("--seed", o.seed, "root seed of every random stream");
  cmd->add_option("--dataset", o.dataset, "TU dataset name");
  cmd->add_option("--data-dir", o.data_dir, "directory holding <NAME>/<NAME>_A.txt etc.")
      ->envname("DRGCL_DATA_DIR");
  cmd->add_option("--threads", o.threads, "classification workers (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = drgcl::cli;
  CLI::App app{"Dimensional-rationale graph contrastive learning"};
  app.set_version_flag("--version", drgcl::kVersion);
  app.require_subcommand(1);

  cli::CommonOptions common;
  std::string out = "runs/latest";
  std::string checkpoint;
  std::string input;
  std::string source = "encoder";
  bool no_apply_r = false;

  auto* pretrain = app.add_subcommand("pretrain", "pre-train encoder, heads and R");
  add_common(pretrain, common);
  pretrain->add_option("--out", out, "output directory");

  auto* eval = app.add_subcommand("eval", "linear cross-validation on frozen embeddings");
  add_common(eval, common);
  eval->add_option("--checkpoint", checkpoint, "pretrain output directory")->required();
  eval->add_option("--out", out, "output directory (default: the checkpoint directory)");
  eval->add_flag("--no-apply-r", no_apply_r, "evaluate h instead of h * R");

  auto* sweep = app.add_subcommand("sweep", "random dimension-preservation sweep");
  add_common(sweep, common);
  sweep->add_option("input", input, "embedding CSV or checkpoint directory")->required();
  sweep->add_option("--out", out, "output directory");
  sweep->add_flag("--no-apply-r", no_apply_r, "use h instead of h * R (checkpoint input)");

  auto* analyze = app.add_subcommand("analyze", "dimension redundancy matrix and image");
  add_common(analyze, common);
  analyze->add_option("input", input, "embedding CSV or checkpoint directory")->required();
  analyze->add_option("--out", out, "output directory");
  analyze->add_option("--source", source, "encoder, rr-head or drin-head (checkpoint input)");
  analyze->add_flag("--no-apply-r", no_apply_r, "use h instead of h * R (checkpoint input)");

  auto* ablate = app.add_subcommand("ablate", "full model against the w/o DR / RR arms");
  add_common(ablate, common);
  ablate->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pretrain) {
      cli::cmd_pretrain(common, out, std::cerr);
    } else if (*eval) {
      const auto dir = eval->count("--out") ? out : checkpoint;
      cli::cmd_eval(common, checkpoint, !no_apply_r, dir, std::cerr);
    } else if (*sweep) {
      cli::cmd_sweep(common, input, !no_apply_r, out, std::cerr);
    } else if (*analyze) {
      cli::cmd_analyze(common, input, !no_apply_r, drgcl::parse_embedding_source(source), out,
                       std::cerr);
    } else if (*ablate) {
      cli::cmd_ablate(common, out, std::cerr);
    }
  } catch (const drgcl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
