#pragma once

#include <string>

#include <json.hpp>

#include "tilt/model/config.hpp"
#include "tilt/numerics/optim.hpp"

namespace tilt {

enum class ScheduleKind { linear, constant };

struct AugmentConfig {
  bool case_aug = false;     // identity/lower/upper copies (x3)
  bool spatial = false;      // bbox stretch/squeeze, factors U[0.8, 1.25]
  bool affine = false;       // page-image affine warp
  double affine_prob = 0.9;
  double image_mask_prob = 0.8;  // pretraining image-region masking
};

struct AblateConfig {
  bool disable_spatial_bias = false;
  bool disable_vision = false;
};

struct RunConfig {
  TiltConfig model;
  AdamWConfig optim;
  ScheduleKind schedule = ScheduleKind::linear;
  int steps = 1000;
  int batch_size = 8;
  AugmentConfig augment;
  AblateConfig ablate;
  uint64_t seed = 0;
  std::string train_data, eval_data;
};

// Finetuning presets; `scale` shrinks steps and batch together for desk use.
struct FinetunePreset {
  const char* name;
  int batch_size;
  int steps;
  double lr;
  ScheduleKind schedule;
};

inline constexpr FinetunePreset kFinetunePresets[] = {
    {"sroie-like", 8, 6200, 1e-4, ScheduleKind::constant},
    {"wikiops-like", 64, 4200, 1e-4, ScheduleKind::constant},
    {"docvqa-like", 64, 100000, 2e-4, ScheduleKind::linear},
    {"cord-like", 8, 36000, 2e-4, ScheduleKind::linear},
    {"rvlcdip-like", 1024, 12000, 1e-3, ScheduleKind::linear},
};

const FinetunePreset& find_preset(const std::string& name);
void apply_preset(RunConfig& cfg, const std::string& name, double scale = 1.0);

nlohmann::json tilt_config_to_json(const TiltConfig& cfg);
TiltConfig tilt_config_from_json(const nlohmann::json& j);

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

}  // namespace tilt
