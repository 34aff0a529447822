#include "tilt/numerics/optim.hpp"

#include <cmath>

namespace tilt {

void AdamW::step(const std::vector<Parameter*>& params, real lr_override) {
  TILT_CHECK(cfg_.lr >= 0, "negative learning rate");
  const real lr = lr_override < 0 ? cfg_.lr : lr_override;
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      m_[i] = Tensor::zeros(params[i]->value.shape());
      v_[i] = Tensor::zeros(params[i]->value.shape());
    }
  }
  TILT_CHECK(m_.size() == params.size(), "optimizer state does not match parameter count");
  ++step_;
  const real bc1 = real(1) - std::pow(cfg_.beta1, static_cast<real>(step_));
  const real bc2 = real(1) - std::pow(cfg_.beta2, static_cast<real>(step_));
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    p.ensure_grad();
    TILT_SHAPE_CHECK(m_[i].same_shape(p.value),
                     "moment shape drifted for parameter " << p.name);
    real* w = p.value.data();
    const real* g = p.grad.data();
    real* m = m_[i].data();
    real* v = v_[i].data();
    for (int64_t k = 0; k < p.value.size(); ++k) {
      m[k] = cfg_.beta1 * m[k] + (real(1) - cfg_.beta1) * g[k];
      v[k] = cfg_.beta2 * v[k] + (real(1) - cfg_.beta2) * g[k] * g[k];
      const real mhat = m[k] / bc1;
      const real vhat = v[k] / bc2;
      w[k] -= lr * (mhat / (std::sqrt(vhat) + cfg_.eps) + cfg_.weight_decay * w[k]);
    }
  }
}

real lr_linear(int64_t step, int64_t total, real base_lr) {
  TILT_CHECK(total > 0, "lr_linear: total steps must be positive");
  TILT_CHECK(step >= 0 && step <= total, "lr_linear: step " << step << " outside [0, " << total << "]");
  const real frac = real(1) - static_cast<real>(step) / static_cast<real>(total);
  return frac > 0 ? base_lr * frac : real(0);
}

}  // namespace tilt
