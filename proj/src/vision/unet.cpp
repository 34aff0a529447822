#include "tilt/vision/unet.hpp"

#include <cmath>
#include <string>

namespace tilt {

namespace {

Tensor he_normal(std::vector<int> shape, int fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const real std = static_cast<real>(std::sqrt(2.0 / fan_in));
  for (int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<real>(rng.normal(0.0, std));
  return t;
}

ConvWeights make_conv(const std::string& name, int cout, int cin, int k, Rng& rng) {
  return {Parameter(name + ".w", he_normal({cout, cin, k, k}, cin * k * k, rng)),
          Parameter(name + ".b", Tensor::zeros({cout}))};
}

ConvWeights make_upconv(const std::string& name, int cin, int cout, Rng& rng) {
  return {Parameter(name + ".w", he_normal({cin, cout, 2, 2}, cin * 4, rng)),
          Parameter(name + ".b", Tensor::zeros({cout}))};
}

}  // namespace

UNetWeights UNetWeights::make(const UNetConfig& cfg, Rng& rng) {
  TILT_CHECK(cfg.valid(), "unet config needs >= 3 stages");
  UNetWeights w;
  w.cfg = cfg;
  int prev = cfg.in_channels;
  for (int k = 0; k < cfg.num_stages(); ++k) {
    const int ch = cfg.stage_channels[static_cast<size_t>(k)];
    const std::string base = "unet.enc" + std::to_string(k);
    w.enc.push_back({make_conv(base + ".conv_a", ch, prev, 3, rng),
                     make_conv(base + ".conv_b", ch, ch, 3, rng)});
    prev = ch;
  }
  for (int j = cfg.num_stages() - 2; j >= 2; --j) {
    const int skip_ch = cfg.stage_channels[static_cast<size_t>(j)];
    const std::string base = "unet.dec" + std::to_string(j);
    w.dec.push_back({make_upconv(base + ".up", prev, skip_ch, rng),
                     make_conv(base + ".merge", skip_ch, 2 * skip_ch, 3, rng)});
    prev = skip_ch;
  }
  w.head = make_conv("unet.head", cfg.out_channels, prev, 1, rng);
  return w;
}

void UNetWeights::collect(std::vector<Parameter*>& out) {
  for (Stage& s : enc) {
    out.push_back(&s.conv_a.w);
    out.push_back(&s.conv_a.b);
    out.push_back(&s.conv_b.w);
    out.push_back(&s.conv_b.b);
  }
  for (DecStage& s : dec) {
    out.push_back(&s.up.w);
    out.push_back(&s.up.b);
    out.push_back(&s.merge.w);
    out.push_back(&s.merge.b);
  }
  out.push_back(&head.w);
  out.push_back(&head.b);
}

int unet_forward(Tape& t, int image_node, UNetWeights& w) {
  const Tensor& img = t.val(image_node);
  TILT_SHAPE_CHECK(img.ndim() == 3 && img.dim(0) == w.cfg.in_channels,
                   "unet_forward: input must be [" << w.cfg.in_channels << ", H, W]");
  const int mult = w.cfg.min_multiple();
  TILT_SHAPE_CHECK(img.dim(1) % mult == 0 && img.dim(2) % mult == 0,
                   "unet_forward: dims " << img.dim(2) << "x" << img.dim(1)
                                         << " must be multiples of " << mult);
  std::vector<int> skips;
  int x = image_node;
  for (int k = 0; k < w.cfg.num_stages(); ++k) {
    UNetWeights::Stage& st = w.enc[static_cast<size_t>(k)];
    x = maxpool2(t, x);
    const int a = relu(t, conv2d(t, x, t.param(st.conv_a.w), t.param(st.conv_a.b), 1));
    const int b = conv2d(t, a, t.param(st.conv_b.w), t.param(st.conv_b.b), 1);
    x = relu(t, add(t, a, b));
    skips.push_back(x);
  }
  for (size_t d = 0; d < w.dec.size(); ++d) {
    UNetWeights::DecStage& st = w.dec[d];
    const int target = w.cfg.num_stages() - 2 - static_cast<int>(d);
    x = upconv2(t, x, t.param(st.up.w), t.param(st.up.b));
    x = concat_channels(t, x, skips[static_cast<size_t>(target)]);
    x = relu(t, conv2d(t, x, t.param(st.merge.w), t.param(st.merge.b), 1));
  }
  return conv2d(t, x, t.param(w.head.w), t.param(w.head.b), 0);
}

}  // namespace tilt
