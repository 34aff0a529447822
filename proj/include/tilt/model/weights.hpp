#pragma once

#include <vector>

#include "tilt/bias/spatial_bias.hpp"
#include "tilt/model/config.hpp"
#include "tilt/vision/unet.hpp"

namespace tilt {

struct AttnWeights {
  Parameter wq, wk, wv, wo;  // each [d_model, d_model], no biases (T5 style)
};

struct EncLayer {
  Parameter attn_norm;
  AttnWeights attn;
  Parameter ffn_norm, ffn_w1, ffn_w2;
};

struct DecLayer {
  Parameter self_norm;
  AttnWeights self_attn;
  Parameter cross_norm;
  AttnWeights cross_attn;
  Parameter ffn_norm, ffn_w1, ffn_w2;
};

// Every learnable tensor of the model, uniquely named for checkpointing.
// The embedding table is tied with the output projection.
struct ModelWeights {
  TiltConfig cfg;
  Parameter embed;  // [vocab, d_model]
  std::vector<EncLayer> enc;
  Parameter enc_final_norm;
  std::vector<DecLayer> dec;
  Parameter dec_final_norm;
  BiasParams bias;
  UNetWeights unet;
  Parameter vision_proj_w, vision_proj_b;  // [unet_out, d_model], [d_model]

  static ModelWeights make(const TiltConfig& cfg, uint64_t seed);

  // Stable creation order; checkpoints and the optimizer both rely on it.
  std::vector<Parameter*> all();
  void zero_grads();
};

}  // namespace tilt
