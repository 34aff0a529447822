#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "tilt/cli/commands.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  double scale = 1.0;
  int64_t seed = -1;
  std::string train_data, eval_data;
};

tilt::RunConfig resolve_config(const CommonOpts& opts) {
  tilt::RunConfig cfg;
  if (!opts.config_path.empty()) cfg = tilt::load_run_config(opts.config_path);
  if (!opts.preset.empty()) tilt::apply_preset(cfg, opts.preset, opts.scale);
  if (opts.seed >= 0) cfg.seed = static_cast<uint64_t>(opts.seed);
  if (!opts.train_data.empty()) cfg.train_data = opts.train_data;
  if (!opts.eval_data.empty()) cfg.eval_data = opts.eval_data;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run config JSON file");
  cmd->add_option("--preset", opts.preset, "finetuning preset name");
  cmd->add_option("--scale", opts.scale, "scale factor applied to preset steps/batch");
  cmd->add_option("--seed", opts.seed, "override rng seed");
  cmd->add_option("--data", opts.train_data, "training dataset (JSONL)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tilt: text-image-layout encoder-decoder for document understanding"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string out_path, init_ckpt, ckpt, metric = "accuracy", log_path;
  std::string synth_kind = "kv";
  int synth_count = 64, page_w = 256, page_h = 192;
  bool no_image = false;

  CLI::App* pretrain = app.add_subcommand("pretrain", "span-corruption pretraining");
  add_common(pretrain, opts);
  pretrain->add_option("--out", out_path, "output checkpoint path");
  pretrain->add_option("--log", log_path, "step log file (default stdout)");

  CLI::App* finetune = app.add_subcommand("finetune", "supervised seq2seq finetuning");
  add_common(finetune, opts);
  finetune->add_option("--init", init_ckpt, "initial checkpoint");
  finetune->add_option("--out", out_path, "output checkpoint path");
  finetune->add_option("--log", log_path, "step log file (default stdout)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--ckpt", ckpt, "checkpoint path")->required();
  eval->add_option("--data", opts.eval_data, "dataset (JSONL)")->required();
  eval->add_option("--metric", metric, "anls | f1 | accuracy");
  eval->add_option("--out", out_path, "report JSON file (default stdout)");

  CLI::App* predict = app.add_subcommand("predict", "generate answers for a dataset");
  predict->add_option("--ckpt", ckpt, "checkpoint path")->required();
  predict->add_option("--data", opts.eval_data, "dataset (JSONL)")->required();
  predict->add_option("--out", out_path, "predictions JSONL (default stdout)");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--out", out_path, "output JSONL path")->required();
  synth->add_option("--count", synth_count, "number of documents");
  synth->add_option("--kind", synth_kind, "kv | kv-below | table | fontstyle | mixed");
  synth->add_option("--seed", opts.seed, "rng seed");
  synth->add_option("--page-w", page_w, "page width (px)");
  synth->add_option("--page-h", page_h, "page height (px)");
  synth->add_flag("--no-image", no_image, "skip rasters");

  CLI::App* ablate = app.add_subcommand("ablate", "paired ablation study on synthetic fixtures");
  add_common(ablate, opts);
  ablate->add_option("--out", out_path, "report JSON file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream log_file;
    std::ostream* log = &std::cout;
    if (!log_path.empty()) {
      log_file.open(log_path);
      log = &log_file;
    }
    auto write_out = [&](const std::string& text) {
      if (out_path.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream f(out_path);
        f << text << "\n";
      }
    };

    if (pretrain->parsed()) {
      tilt::cmd_pretrain(resolve_config(opts), out_path, *log);
    } else if (finetune->parsed()) {
      tilt::cmd_finetune(resolve_config(opts), init_ckpt, out_path, *log);
    } else if (eval->parsed()) {
      write_out(tilt::cmd_eval(ckpt, opts.eval_data, metric).to_json_string());
    } else if (predict->parsed()) {
      if (out_path.empty()) {
        tilt::cmd_predict(ckpt, opts.eval_data, std::cout);
      } else {
        std::ofstream f(out_path);
        tilt::cmd_predict(ckpt, opts.eval_data, f);
      }
    } else if (synth->parsed()) {
      const uint64_t seed = opts.seed >= 0 ? static_cast<uint64_t>(opts.seed) : 0;
      tilt::cmd_synth(out_path, synth_count, tilt::synth_kind_from_name(synth_kind), seed,
                      page_w, page_h, !no_image);
    } else if (ablate->parsed()) {
      tilt::RunConfig cfg = resolve_config(opts);
      if (opts.config_path.empty()) {
        // desk-scale defaults: small raster, shallow visual encoder
        cfg.model.raster_w = 128;
        cfg.model.raster_h = 96;
        cfg.model.unet.stage_channels = {8, 16, 32};
        cfg.model.unet.out_channels = 32;
        cfg.steps = 500;
        cfg.batch_size = 8;
        cfg.optim.lr = static_cast<tilt::real>(1e-3);
        cfg.schedule = tilt::ScheduleKind::constant;
      }
      write_out(tilt::cmd_ablate(cfg, std::cerr).dump(2));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
