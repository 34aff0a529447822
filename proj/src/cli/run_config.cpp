#include "tilt/cli/run_config.hpp"

#include <cmath>
#include <fstream>

#include "tilt/check.hpp"

namespace tilt {

using nlohmann::json;

const FinetunePreset& find_preset(const std::string& name) {
  for (const FinetunePreset& p : kFinetunePresets) {
    if (name == p.name) return p;
  }
  throw ValidationError("unknown preset '" + name + "'");
}

void apply_preset(RunConfig& cfg, const std::string& name, double scale) {
  TILT_VALIDATE(scale > 0, "preset scale must be positive");
  const FinetunePreset& p = find_preset(name);
  cfg.batch_size = std::max(1, static_cast<int>(std::lround(p.batch_size * scale)));
  cfg.steps = std::max(1, static_cast<int>(std::lround(p.steps * scale)));
  cfg.optim.lr = static_cast<real>(p.lr);
  cfg.schedule = p.schedule;
}

json tilt_config_to_json(const TiltConfig& cfg) {
  return json{{"d_model", cfg.d_model},
              {"num_heads", cfg.num_heads},
              {"d_ff", cfg.d_ff},
              {"enc_layers", cfg.enc_layers},
              {"dec_layers", cfg.dec_layers},
              {"vocab_size", cfg.vocab_size},
              {"max_src_len", cfg.max_src_len},
              {"max_tgt_len", cfg.max_tgt_len},
              {"dropout", cfg.dropout},
              {"attn_scale", cfg.attn_scale == AttnScale::sqrt_n ? "sqrt_n" : "sqrt_d_head"},
              {"raster_w", cfg.raster_w},
              {"raster_h", cfg.raster_h},
              {"grid_w", cfg.grid_w},
              {"grid_h", cfg.grid_h},
              {"unet_stages", cfg.unet.stage_channels},
              {"unet_out_channels", cfg.unet.out_channels}};
}

namespace {

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

TiltConfig tilt_config_from_json(const json& j) {
  TiltConfig cfg;
  maybe_get(j, "d_model", cfg.d_model);
  maybe_get(j, "num_heads", cfg.num_heads);
  maybe_get(j, "d_ff", cfg.d_ff);
  maybe_get(j, "enc_layers", cfg.enc_layers);
  maybe_get(j, "dec_layers", cfg.dec_layers);
  maybe_get(j, "vocab_size", cfg.vocab_size);
  maybe_get(j, "max_src_len", cfg.max_src_len);
  maybe_get(j, "max_tgt_len", cfg.max_tgt_len);
  maybe_get(j, "dropout", cfg.dropout);
  if (j.contains("attn_scale")) {
    const std::string s = j.at("attn_scale").get<std::string>();
    TILT_VALIDATE(s == "sqrt_n" || s == "sqrt_d_head", "bad attn_scale '" << s << "'");
    cfg.attn_scale = s == "sqrt_n" ? AttnScale::sqrt_n : AttnScale::sqrt_d_head;
  }
  maybe_get(j, "raster_w", cfg.raster_w);
  maybe_get(j, "raster_h", cfg.raster_h);
  maybe_get(j, "grid_w", cfg.grid_w);
  maybe_get(j, "grid_h", cfg.grid_h);
  maybe_get(j, "unet_stages", cfg.unet.stage_channels);
  maybe_get(j, "unet_out_channels", cfg.unet.out_channels);
  validate_config(cfg);
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  return json{
      {"model", tilt_config_to_json(cfg.model)},
      {"optim",
       {{"lr", static_cast<double>(cfg.optim.lr)},
        {"beta1", static_cast<double>(cfg.optim.beta1)},
        {"beta2", static_cast<double>(cfg.optim.beta2)},
        {"eps", static_cast<double>(cfg.optim.eps)},
        {"weight_decay", static_cast<double>(cfg.optim.weight_decay)}}},
      {"schedule", cfg.schedule == ScheduleKind::linear ? "linear" : "constant"},
      {"steps", cfg.steps},
      {"batch_size", cfg.batch_size},
      {"augment",
       {{"case", cfg.augment.case_aug},
        {"spatial", cfg.augment.spatial},
        {"affine", cfg.augment.affine},
        {"affine_prob", cfg.augment.affine_prob},
        {"image_mask_prob", cfg.augment.image_mask_prob}}},
      {"ablate",
       {{"disable_spatial_bias", cfg.ablate.disable_spatial_bias},
        {"disable_vision", cfg.ablate.disable_vision}}},
      {"seed", cfg.seed},
      {"data", {{"train", cfg.train_data}, {"eval", cfg.eval_data}}}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  if (j.contains("model")) cfg.model = tilt_config_from_json(j.at("model"));
  if (j.contains("optim")) {
    const json& o = j.at("optim");
    double v;
    if (o.contains("lr")) { v = o.at("lr").get<double>(); cfg.optim.lr = static_cast<real>(v); }
    if (o.contains("beta1")) { v = o.at("beta1").get<double>(); cfg.optim.beta1 = static_cast<real>(v); }
    if (o.contains("beta2")) { v = o.at("beta2").get<double>(); cfg.optim.beta2 = static_cast<real>(v); }
    if (o.contains("eps")) { v = o.at("eps").get<double>(); cfg.optim.eps = static_cast<real>(v); }
    if (o.contains("weight_decay")) {
      v = o.at("weight_decay").get<double>();
      cfg.optim.weight_decay = static_cast<real>(v);
    }
  }
  if (j.contains("schedule")) {
    const std::string s = j.at("schedule").get<std::string>();
    TILT_VALIDATE(s == "linear" || s == "constant", "bad schedule '" << s << "'");
    cfg.schedule = s == "linear" ? ScheduleKind::linear : ScheduleKind::constant;
  }
  maybe_get(j, "steps", cfg.steps);
  maybe_get(j, "batch_size", cfg.batch_size);
  if (j.contains("augment")) {
    const json& a = j.at("augment");
    maybe_get(a, "case", cfg.augment.case_aug);
    maybe_get(a, "spatial", cfg.augment.spatial);
    maybe_get(a, "affine", cfg.augment.affine);
    maybe_get(a, "affine_prob", cfg.augment.affine_prob);
    maybe_get(a, "image_mask_prob", cfg.augment.image_mask_prob);
  }
  if (j.contains("ablate")) {
    const json& a = j.at("ablate");
    maybe_get(a, "disable_spatial_bias", cfg.ablate.disable_spatial_bias);
    maybe_get(a, "disable_vision", cfg.ablate.disable_vision);
  }
  maybe_get(j, "seed", cfg.seed);
  if (j.contains("data")) {
    const json& d = j.at("data");
    maybe_get(d, "train", cfg.train_data);
    maybe_get(d, "eval", cfg.eval_data);
  }
  TILT_VALIDATE(cfg.steps > 0, "steps must be positive");
  TILT_VALIDATE(cfg.batch_size > 0, "batch_size must be positive");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  TILT_VALIDATE(in.good(), "cannot open config " << path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace tilt
