#pragma once

#include <vector>

#include "tilt/numerics/ops.hpp"
#include "tilt/rng.hpp"

namespace tilt {

// Truncated U-Net: encoder blocks at /2, /4, ... /2^S (3x3 convs with a
// residual per block, 2x2 max-pool before each), decoder up-convs back to /8
// with skip concatenation, and a 1x1 head. At the default plan a 512x384 page
// ends up as a 64x48x128 feature map.
struct UNetConfig {
  int in_channels = 1;
  std::vector<int> stage_channels = {16, 32, 64, 128, 128};
  int out_channels = 128;

  int num_stages() const { return static_cast<int>(stage_channels.size()); }
  int min_multiple() const { return 1 << num_stages(); }
  bool valid() const { return num_stages() >= 3 && in_channels > 0 && out_channels > 0; }
  bool operator==(const UNetConfig&) const = default;
};

struct ConvWeights {
  Parameter w, b;
};

struct UNetWeights {
  UNetConfig cfg;
  struct Stage {
    ConvWeights conv_a, conv_b;
  };
  struct DecStage {
    ConvWeights up, merge;
  };
  std::vector<Stage> enc;
  std::vector<DecStage> dec;  // targets stage S-2 down to 2
  ConvWeights head;

  static UNetWeights make(const UNetConfig& cfg, Rng& rng);
  void collect(std::vector<Parameter*>& out);
};

// image node is [1, H, W] with H, W divisible by 2^num_stages.
// Output: [out_channels, H/8, W/8].
int unet_forward(Tape& t, int image_node, UNetWeights& w);

}  // namespace tilt
