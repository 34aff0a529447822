#pragma once

#include "tilt/model/vocab.hpp"
#include "tilt/vision/unet.hpp"

namespace tilt {

// The attention logit divisor. sqrt_d_head is the conventional reading;
// sqrt_n divides by the key count instead and is kept selectable.
enum class AttnScale { sqrt_d_head, sqrt_n };

struct TiltConfig {
  int d_model = 64;
  int num_heads = 4;
  int d_ff = 128;
  int enc_layers = 2;
  int dec_layers = 2;
  int vocab_size = vocab::kSize;
  int max_src_len = 256;
  int max_tgt_len = 32;
  double dropout = 0.0;
  AttnScale attn_scale = AttnScale::sqrt_d_head;

  // shared coordinate spaces: page raster consumed by the visual encoder and
  // the grid the bias distances are measured on
  int raster_w = 512, raster_h = 384;
  int grid_w = 64, grid_h = 48;
  UNetConfig unet;

  int d_head() const { return d_model / num_heads; }
  bool operator==(const TiltConfig&) const = default;
};

// Throws ValidationError on an inconsistent config.
void validate_config(const TiltConfig& cfg);

}  // namespace tilt
