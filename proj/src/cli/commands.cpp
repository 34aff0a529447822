#include "tilt/cli/commands.hpp"

#include <cmath>
#include <sstream>

#include "tilt/cli/checkpoint.hpp"
#include "tilt/layout/dataset.hpp"

namespace tilt {

using nlohmann::json;

EvalReport evaluate_model(TiltModel& model, const std::vector<Document>& docs,
                          const std::string& metric, const RunFlags& flags) {
  TILT_VALIDATE(metric == "anls" || metric == "f1" || metric == "accuracy",
                "unknown metric '" << metric << "'");
  EvalReport report;
  report.metric = metric;

  if (metric == "f1") {
    F1Counts total;
    for (const Document& doc : docs) {
      std::map<std::string, std::optional<std::string>> preds;
      std::map<std::string, std::string> golds;
      for (const TaskInstance& inst : doc.annotations) {
        if (inst.task != TaskKind::kie) continue;
        const Seq2SeqExample ex = to_seq2seq(doc, inst);
        const std::string pred = model.generate(model.prepare(ex, flags), flags);
        preds[inst.prompt] = pred;
        if (!inst.answers.empty() && normalize_answer(inst.answers.front()) != "none") {
          golds[inst.prompt] = inst.answers.front();
        }
        EvalRecord rec;
        rec.id = doc.id;
        rec.prompt = inst.prompt;
        rec.prediction = pred;
        rec.golds = inst.answers;
        std::map<std::string, std::optional<std::string>> p1{{inst.prompt, pred}};
        std::map<std::string, std::string> g1;
        if (golds.count(inst.prompt)) g1[inst.prompt] = golds[inst.prompt];
        const F1Counts c = entity_f1(p1, g1);
        rec.tp = c.tp;
        rec.fp = c.fp;
        rec.fn = c.fn;
        rec.score = c.f1();
        report.records.push_back(std::move(rec));
        total += c;
      }
    }
    report.value = total.f1();
    return report;
  }

  double sum = 0;
  int count = 0;
  for (const Document& doc : docs) {
    for (const TaskInstance& inst : doc.annotations) {
      const Seq2SeqExample ex = to_seq2seq(doc, inst);
      const std::string pred = model.generate(model.prepare(ex, flags), flags);
      EvalRecord rec;
      rec.id = doc.id;
      rec.prompt = inst.prompt;
      rec.prediction = pred;
      rec.golds = inst.answers;
      if (metric == "anls") {
        rec.score = inst.answers.empty() ? 0.0 : anls_score(pred, inst.answers);
      } else {
        rec.score = !inst.answers.empty() && normalize_answer(pred) ==
                                                 normalize_answer(inst.answers.front())
                        ? 1.0
                        : 0.0;
      }
      sum += rec.score;
      ++count;
      report.records.push_back(std::move(rec));
    }
  }
  report.value = count == 0 ? 0.0 : sum / count;
  return report;
}

namespace {

RunFlags flags_from(const AblateConfig& ablate) {
  RunFlags f;
  f.use_spatial_bias = !ablate.disable_spatial_bias;
  f.use_vision = !ablate.disable_vision;
  return f;
}

void check_config_compatible(const TiltConfig& ckpt, const TiltConfig& run) {
  if (ckpt == run) return;
  std::ostringstream what;
  what << "checkpoint config mismatch:";
  auto diff = [&](const char* field, auto a, auto b) {
    if (!(a == b)) what << " " << field;
  };
  diff("d_model", ckpt.d_model, run.d_model);
  diff("num_heads", ckpt.num_heads, run.num_heads);
  diff("d_ff", ckpt.d_ff, run.d_ff);
  diff("enc_layers", ckpt.enc_layers, run.enc_layers);
  diff("dec_layers", ckpt.dec_layers, run.dec_layers);
  diff("vocab_size", ckpt.vocab_size, run.vocab_size);
  diff("max_src_len", ckpt.max_src_len, run.max_src_len);
  diff("max_tgt_len", ckpt.max_tgt_len, run.max_tgt_len);
  diff("dropout", ckpt.dropout, run.dropout);
  diff("attn_scale", ckpt.attn_scale == AttnScale::sqrt_n, run.attn_scale == AttnScale::sqrt_n);
  diff("raster_w", ckpt.raster_w, run.raster_w);
  diff("raster_h", ckpt.raster_h, run.raster_h);
  diff("grid_w", ckpt.grid_w, run.grid_w);
  diff("grid_h", ckpt.grid_h, run.grid_h);
  diff("unet_stages", ckpt.unet.stage_channels, run.unet.stage_channels);
  diff("unet_out_channels", ckpt.unet.out_channels, run.unet.out_channels);
  throw ValidationError(what.str());
}

}  // namespace

void cmd_pretrain(const RunConfig& cfg, const std::string& out_ckpt, std::ostream& log) {
  const std::vector<Document> docs = load_dataset(cfg.train_data);
  TILT_VALIDATE(!docs.empty(), "pretraining corpus " << cfg.train_data << " is empty");
  TiltModel model(cfg.model, cfg.seed);
  Trainer trainer(model, docs, cfg, TrainTask::pretrain, &log);
  trainer.run();
  if (!out_ckpt.empty()) save_checkpoint(out_ckpt, model);
}

void cmd_finetune(const RunConfig& cfg, const std::string& init_ckpt,
                  const std::string& out_ckpt, std::ostream& log) {
  const std::vector<Document> docs = load_dataset(cfg.train_data);
  TILT_VALIDATE(!docs.empty(), "finetuning dataset " << cfg.train_data << " is empty");
  std::optional<TiltModel> model;
  if (!init_ckpt.empty()) {
    LoadedCheckpoint loaded = load_checkpoint(init_ckpt);
    check_config_compatible(loaded.model.config(), cfg.model);
    model.emplace(std::move(loaded.model));
  } else {
    model.emplace(cfg.model, cfg.seed);
  }
  Trainer trainer(*model, docs, cfg, TrainTask::finetune, &log);
  trainer.run();
  if (!out_ckpt.empty()) save_checkpoint(out_ckpt, *model);
}

EvalReport cmd_eval(const std::string& ckpt, const std::string& data, const std::string& metric,
                    const AblateConfig& ablate) {
  LoadedCheckpoint loaded = load_checkpoint(ckpt);
  const std::vector<Document> docs = load_dataset(data);
  return evaluate_model(loaded.model, docs, metric, flags_from(ablate));
}

void cmd_predict(const std::string& ckpt, const std::string& data, std::ostream& out,
                 const AblateConfig& ablate) {
  LoadedCheckpoint loaded = load_checkpoint(ckpt);
  const RunFlags flags = flags_from(ablate);
  for (const Document& doc : load_dataset(data)) {
    for (const TaskInstance& inst : doc.annotations) {
      const Seq2SeqExample ex = to_seq2seq(doc, inst);
      const std::string pred =
          loaded.model.generate(loaded.model.prepare(ex, flags), flags);
      out << json{{"id", doc.id}, {"prompt", inst.prompt}, {"prediction", pred}}.dump() << "\n";
    }
  }
}

void cmd_synth(const std::string& out_path, int count, SynthKind kind, uint64_t seed, int page_w,
               int page_h, bool with_image) {
  save_dataset(synth_corpus(seed, count, kind, page_w, page_h, with_image), out_path);
}

namespace {

struct AblationRun {
  double mean = 0, spread = 0;
  std::vector<double> scores;
};

AblationRun ablation_runs(const RunConfig& base, const AblateConfig& variant,
                          const std::vector<Document>& train, const std::vector<Document>& test,
                          std::ostream& progress, const std::string& label) {
  AblationRun out;
  for (uint64_t s = 0; s < 2; ++s) {
    RunConfig cfg = base;
    cfg.ablate = variant;
    cfg.seed = base.seed + s;
    TiltModel model(cfg.model, cfg.seed);
    Trainer trainer(model, train, cfg, TrainTask::finetune, nullptr);
    trainer.run();
    const EvalReport rep = evaluate_model(model, test, "accuracy", trainer.eval_flags());
    out.scores.push_back(rep.value);
    progress << "  " << label << " seed " << cfg.seed << ": exact match " << rep.value << "\n";
    progress.flush();
  }
  out.mean = (out.scores[0] + out.scores[1]) / 2;
  out.spread = std::abs(out.scores[0] - out.scores[1]) / 2;
  return out;
}

json run_to_json(const AblationRun& r) {
  return json{{"mean", r.mean}, {"spread", r.spread}, {"runs", r.scores}};
}

}  // namespace

json cmd_ablate(const RunConfig& cfg, std::ostream& progress) {
  // layout-dependent QA: answers fixed by below-of geometry, no rasters
  const std::vector<Document> layout_all =
      synth_corpus(cfg.seed + 101, 160, SynthKind::kv_below, 256, 192, /*with_image=*/false);
  // font-style cue: the answer is only visible in the raster
  const std::vector<Document> font_all =
      synth_corpus(cfg.seed + 202, 160, SynthKind::fontstyle, cfg.model.raster_w,
                   cfg.model.raster_h, /*with_image=*/true);
  const auto split = [](const std::vector<Document>& all) {
    const size_t ntest = all.size() / 5;
    return std::pair<std::vector<Document>, std::vector<Document>>(
        {all.begin(), all.end() - static_cast<long>(ntest)},
        {all.end() - static_cast<long>(ntest), all.end()});
  };
  const auto [layout_train, layout_test] = split(layout_all);
  const auto [font_train, font_test] = split(font_all);

  const AblateConfig full{}, no_bias{true, false}, no_vision{false, true};
  json report;
  progress << "layout task (" << layout_train.size() << " train / " << layout_test.size()
           << " test docs)\n";
  report["layout_qa"]["full"] =
      run_to_json(ablation_runs(cfg, full, layout_train, layout_test, progress, "full"));
  report["layout_qa"]["no_spatial_bias"] = run_to_json(
      ablation_runs(cfg, no_bias, layout_train, layout_test, progress, "no_spatial_bias"));
  report["layout_qa"]["no_vision"] = run_to_json(
      ablation_runs(cfg, no_vision, layout_train, layout_test, progress, "no_vision"));
  progress << "font-style task (" << font_train.size() << " train / " << font_test.size()
           << " test docs)\n";
  report["font_style"]["full"] =
      run_to_json(ablation_runs(cfg, full, font_train, font_test, progress, "full"));
  report["font_style"]["no_spatial_bias"] = run_to_json(
      ablation_runs(cfg, no_bias, font_train, font_test, progress, "no_spatial_bias"));
  report["font_style"]["no_vision"] = run_to_json(
      ablation_runs(cfg, no_vision, font_train, font_test, progress, "no_vision"));
  return report;
}

}  // namespace tilt
