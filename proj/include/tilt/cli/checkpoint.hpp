#pragma once

#include <string>

#include "tilt/model/model.hpp"
#include "tilt/numerics/optim.hpp"

namespace tilt {

// Single-file checkpoint: 8-byte magic, u32 version, u32 header length, JSON
// header (config echo + ordered tensor manifest), then raw little-endian
// 32-bit float payloads. Loads are strict: tensor names and shapes must match
// the model built from the embedded config exactly, in order.
inline constexpr char kCheckpointMagic[8] = {'T', 'I', 'L', 'T', 'C', 'K', 'P', 'T'};
inline constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, TiltModel& model, AdamW* optimizer = nullptr);

struct LoadedCheckpoint {
  TiltModel model;
  bool has_optimizer = false;
  AdamWConfig optim_config;
  int64_t optim_step = 0;
  std::vector<Tensor> optim_m, optim_v;  // aligned with model.params()
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace tilt
