#pragma once

#include <vector>

#include "tilt/numerics/tape.hpp"

namespace tilt {

struct AdamWConfig {
  real lr = real(2e-4);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real eps = real(1e-8);
  real weight_decay = real(0.01);
};

// Decoupled weight decay; moments are bias-corrected.
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg) : cfg_(cfg) {}

  const AdamWConfig& config() const { return cfg_; }
  int64_t step_count() const { return step_; }

  // Applies one update from each parameter's accumulated .grad, then
  // leaves the grads untouched (caller decides when to zero them).
  // lr_override < 0 means use the configured lr. The params list must be
  // identical (same order) across calls.
  void step(const std::vector<Parameter*>& params, real lr_override = real(-1));

  // Moment tensors, aligned with the params vector; exposed for persistence.
  std::vector<Tensor>& first_moments() { return m_; }
  std::vector<Tensor>& second_moments() { return v_; }
  void restore(int64_t step, std::vector<Tensor> m, std::vector<Tensor> v) {
    step_ = step;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  AdamWConfig cfg_;
  int64_t step_ = 0;
  std::vector<Tensor> m_, v_;
};

// base_lr * (1 - step/total), floored at 0. total must be positive.
real lr_linear(int64_t step, int64_t total, real base_lr);

}  // namespace tilt
