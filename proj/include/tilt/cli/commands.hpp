#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "tilt/cli/run_config.hpp"
#include "tilt/cli/trainer.hpp"
#include "tilt/layout/synth.hpp"
#include "tilt/metrics/metrics.hpp"

namespace tilt {

// Greedy generation per annotated instance + metric aggregation.
// metric: "anls" | "f1" | "accuracy".
EvalReport evaluate_model(TiltModel& model, const std::vector<Document>& docs,
                          const std::string& metric, const RunFlags& flags);

void cmd_pretrain(const RunConfig& cfg, const std::string& out_ckpt, std::ostream& log);
void cmd_finetune(const RunConfig& cfg, const std::string& init_ckpt,
                  const std::string& out_ckpt, std::ostream& log);
EvalReport cmd_eval(const std::string& ckpt, const std::string& data, const std::string& metric,
                    const AblateConfig& ablate = {});
void cmd_predict(const std::string& ckpt, const std::string& data, std::ostream& out,
                 const AblateConfig& ablate = {});
void cmd_synth(const std::string& out_path, int count, SynthKind kind, uint64_t seed,
               int page_w, int page_h, bool with_image);

// Paired ablation runs (full / no spatial bias / no vision, two seeds each)
// on two built-in synthetic fixtures: a geometry-dependent QA task and a
// font-style-cue task. Returns the comparative report.
nlohmann::json cmd_ablate(const RunConfig& cfg, std::ostream& progress);

}  // namespace tilt
