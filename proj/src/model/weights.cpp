#include "tilt/model/weights.hpp"

#include <cmath>
#include <string>

namespace tilt {

void validate_config(const TiltConfig& cfg) {
  TILT_VALIDATE(cfg.d_model > 0 && cfg.num_heads > 0 && cfg.d_model % cfg.num_heads == 0,
                "d_model " << cfg.d_model << " must be divisible by num_heads " << cfg.num_heads);
  TILT_VALIDATE(cfg.d_ff > 0 && cfg.enc_layers > 0 && cfg.dec_layers > 0, "layer sizes must be positive");
  TILT_VALIDATE(cfg.max_src_len > 0 && cfg.max_tgt_len > 0, "sequence lengths must be positive");
  TILT_VALIDATE(cfg.vocab_size == vocab::kSize, "vocab size is fixed at " << vocab::kSize);
  TILT_VALIDATE(cfg.dropout >= 0.0 && cfg.dropout < 1.0, "dropout must be in [0, 1)");
  TILT_VALIDATE(cfg.unet.valid(), "unet config needs >= 3 stages");
  const int mult = cfg.unet.min_multiple();
  TILT_VALIDATE(cfg.raster_w % mult == 0 && cfg.raster_h % mult == 0,
                "raster " << cfg.raster_w << "x" << cfg.raster_h << " must be a multiple of "
                          << mult);
  TILT_VALIDATE(cfg.grid_w > 0 && cfg.grid_h > 0, "grid dims must be positive");
}

namespace {

Tensor normal_init(std::vector<int> shape, double stddev, Rng& rng) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<real>(rng.normal(0.0, stddev));
  return t;
}

Parameter linear(const std::string& name, int in, int out, Rng& rng) {
  return Parameter(name, normal_init({in, out}, std::sqrt(2.0 / (in + out)), rng));
}

AttnWeights make_attn(const std::string& base, int d, Rng& rng) {
  return {linear(base + ".wq", d, d, rng), linear(base + ".wk", d, d, rng),
          linear(base + ".wv", d, d, rng), linear(base + ".wo", d, d, rng)};
}

Parameter ones(const std::string& name, int d) {
  return Parameter(name, Tensor::full({d}, real(1)));
}

}  // namespace

ModelWeights ModelWeights::make(const TiltConfig& cfg, uint64_t seed) {
  validate_config(cfg);
  Rng rng(seed);
  ModelWeights w;
  w.cfg = cfg;
  const int d = cfg.d_model;
  w.embed = Parameter("embed", normal_init({cfg.vocab_size, d}, 0.1, rng));
  for (int l = 0; l < cfg.enc_layers; ++l) {
    const std::string base = "enc.l" + std::to_string(l);
    EncLayer layer;
    layer.attn_norm = ones(base + ".attn_norm", d);
    layer.attn = make_attn(base + ".attn", d, rng);
    layer.ffn_norm = ones(base + ".ffn_norm", d);
    layer.ffn_w1 = linear(base + ".ffn.w1", d, cfg.d_ff, rng);
    layer.ffn_w2 = linear(base + ".ffn.w2", cfg.d_ff, d, rng);
    w.enc.push_back(std::move(layer));
  }
  w.enc_final_norm = ones("enc.final_norm", d);
  for (int l = 0; l < cfg.dec_layers; ++l) {
    const std::string base = "dec.l" + std::to_string(l);
    DecLayer layer;
    layer.self_norm = ones(base + ".self_norm", d);
    layer.self_attn = make_attn(base + ".self", d, rng);
    layer.cross_norm = ones(base + ".cross_norm", d);
    layer.cross_attn = make_attn(base + ".cross", d, rng);
    layer.ffn_norm = ones(base + ".ffn_norm", d);
    layer.ffn_w1 = linear(base + ".ffn.w1", d, cfg.d_ff, rng);
    layer.ffn_w2 = linear(base + ".ffn.w2", cfg.d_ff, d, rng);
    w.dec.push_back(std::move(layer));
  }
  w.dec_final_norm = ones("dec.final_norm", d);
  w.bias = BiasParams::make(cfg.num_heads);
  Rng unet_rng = rng.derive(1);
  w.unet = UNetWeights::make(cfg.unet, unet_rng);
  w.vision_proj_w = linear("vision.proj.w", cfg.unet.out_channels, d, rng);
  w.vision_proj_b = Parameter("vision.proj.b", Tensor::zeros({d}));
  return w;
}

std::vector<Parameter*> ModelWeights::all() {
  std::vector<Parameter*> out;
  out.push_back(&embed);
  for (EncLayer& l : enc) {
    out.push_back(&l.attn_norm);
    out.push_back(&l.attn.wq);
    out.push_back(&l.attn.wk);
    out.push_back(&l.attn.wv);
    out.push_back(&l.attn.wo);
    out.push_back(&l.ffn_norm);
    out.push_back(&l.ffn_w1);
    out.push_back(&l.ffn_w2);
  }
  out.push_back(&enc_final_norm);
  for (DecLayer& l : dec) {
    out.push_back(&l.self_norm);
    out.push_back(&l.self_attn.wq);
    out.push_back(&l.self_attn.wk);
    out.push_back(&l.self_attn.wv);
    out.push_back(&l.self_attn.wo);
    out.push_back(&l.cross_norm);
    out.push_back(&l.cross_attn.wq);
    out.push_back(&l.cross_attn.wk);
    out.push_back(&l.cross_attn.wv);
    out.push_back(&l.cross_attn.wo);
    out.push_back(&l.ffn_norm);
    out.push_back(&l.ffn_w1);
    out.push_back(&l.ffn_w2);
  }
  out.push_back(&dec_final_norm);
  for (Parameter* p : bias.all()) out.push_back(p);
  unet.collect(out);
  out.push_back(&vision_proj_w);
  out.push_back(&vision_proj_b);
  return out;
}

void ModelWeights::zero_grads() {
  for (Parameter* p : all()) p->zero_grad();
}

}  // namespace tilt
