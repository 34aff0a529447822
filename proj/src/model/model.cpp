#include "tilt/model/model.hpp"

#include <cmath>

#include "tilt/vision/roi.hpp"

namespace tilt {

PreparedExample TiltModel::prepare(const Seq2SeqExample& ex, const RunFlags& flags) const {
  const TiltConfig& cfg = weights_.cfg;
  TILT_CHECK(ex.page_w > 0 && ex.page_h > 0, "prepare: example has no page dimensions");
  PreparedExample out;
  out.page_w = cfg.raster_w;
  out.page_h = cfg.raster_h;
  const double fx = static_cast<double>(cfg.raster_w) / ex.page_w;
  const double fy = static_cast<double>(cfg.raster_h) / ex.page_h;

  for (const SrcWord& w : ex.src_words) {
    std::vector<int> ids;
    if (w.sentinel >= 0) {
      ids.push_back(vocab::sentinel(w.sentinel));
    } else if (w.anchor) {
      ids.push_back(vocab::kPad);
    } else {
      ids = vocab::encode_text(w.text);
    }
    const BBox scaled{w.bbox.x0 * fx, w.bbox.y0 * fy, w.bbox.x1 * fx, w.bbox.y1 * fy};
    for (int id : ids) {
      if (static_cast<int>(out.src_ids.size()) >= cfg.max_src_len) {
        out.truncated = true;
        break;
      }
      out.src_ids.push_back(id);
      out.src_boxes.push_back(scaled);
    }
    if (out.truncated) break;
  }
  TILT_CHECK(!out.src_ids.empty(), "prepare: empty source sequence");
  out.centers = quantize_centers(out.src_boxes, out.page_w, out.page_h, cfg.grid_w, cfg.grid_h);

  out.target_ids = ex.target_ids;
  if (static_cast<int>(out.target_ids.size()) > cfg.max_tgt_len) {
    out.target_ids.resize(static_cast<size_t>(cfg.max_tgt_len));
  }

  if (flags.use_vision && ex.image) {
    out.image = resize_bilinear(*ex.image, cfg.raster_w, cfg.raster_h);
  }
  return out;
}

int TiltModel::maybe_dropout(Tape& t, int x, const RunFlags& flags) {
  const real p = static_cast<real>(weights_.cfg.dropout);
  if (!flags.training || p <= 0) return x;
  TILT_CHECK(flags.dropout_rng != nullptr, "training with dropout needs a dropout rng");
  return dropout(t, x, p, *flags.dropout_rng);
}

int TiltModel::attention(Tape& t, int q_in, int kv_in, AttnWeights& w, int bias_node,
                         bool causal, const RunFlags& flags) {
  const TiltConfig& cfg = weights_.cfg;
  const int dh = cfg.d_head();
  const int q = matmul(t, q_in, t.param(w.wq));
  const int k = matmul(t, kv_in, t.param(w.wk));
  const int v = matmul(t, kv_in, t.param(w.wv));
  const int n_keys = t.val(k).dim(0);
  const real divisor = cfg.attn_scale == AttnScale::sqrt_n
                           ? std::sqrt(static_cast<real>(n_keys))
                           : std::sqrt(static_cast<real>(dh));
  std::vector<int> heads;
  heads.reserve(static_cast<size_t>(cfg.num_heads));
  for (int h = 0; h < cfg.num_heads; ++h) {
    const int qh = slice_cols(t, q, h * dh, (h + 1) * dh);
    const int kh = slice_cols(t, k, h * dh, (h + 1) * dh);
    const int vh = slice_cols(t, v, h * dh, (h + 1) * dh);
    int scores = scale(t, matmul_nt(t, qh, kh), real(1) / divisor);
    if (bias_node >= 0) scores = add(t, scores, slice_plane(t, bias_node, h));
    const int probs = softmax_rows(t, scores, causal);
    heads.push_back(matmul(t, probs, vh));
  }
  const int ctx = concat_cols(t, heads);
  return matmul(t, ctx, t.param(w.wo));
}

int TiltModel::ffn(Tape& t, int x, Parameter& w1, Parameter& w2, const RunFlags& flags) {
  const int hidden = relu(t, matmul(t, x, t.param(w1)));
  return matmul(t, maybe_dropout(t, hidden, flags), t.param(w2));
}

int TiltModel::encode(Tape& t, const PreparedExample& ex, const RunFlags& flags) {
  const TiltConfig& cfg = weights_.cfg;
  const int n = static_cast<int>(ex.src_ids.size());
  TILT_CHECK(n > 0, "encode: empty input");

  int x = embed_rows(t, t.param(weights_.embed), ex.src_ids);  // S
  if (flags.use_vision && ex.image) {
    TILT_SHAPE_CHECK(ex.image->width == cfg.raster_w && ex.image->height == cfg.raster_h,
                     "encode: raster is " << ex.image->width << "x" << ex.image->height
                                          << ", expected " << cfg.raster_w << "x"
                                          << cfg.raster_h);
    Tensor img({1, ex.image->height, ex.image->width});
    for (int64_t i = 0; i < img.size(); ++i) img[i] = static_cast<real>(ex.image->pix[static_cast<size_t>(i)]);
    const int fm = unet_forward(t, t.leaf(std::move(img)), weights_.unet);
    const int pooled = roi_pool(t, fm, ex.src_boxes, ex.page_w, ex.page_h);
    const int u = project_embed(t, pooled, weights_.vision_proj_w, weights_.vision_proj_b);
    x = add(t, x, u);  // X = S + U
  }

  int bias_node = -1;
  if (flags.use_spatial_bias) {
    bias_node = build_bias(t, ex.centers, weights_.bias);
  }
  for (EncLayer& layer : weights_.enc) {
    const int h = rms_norm(t, x, t.param(layer.attn_norm));
    const int a = attention(t, h, h, layer.attn, bias_node, /*causal=*/false, flags);
    x = add(t, x, maybe_dropout(t, a, flags));
    const int h2 = rms_norm(t, x, t.param(layer.ffn_norm));
    const int f = ffn(t, h2, layer.ffn_w1, layer.ffn_w2, flags);
    x = add(t, x, maybe_dropout(t, f, flags));
  }
  return rms_norm(t, x, t.param(weights_.enc_final_norm));
}

int TiltModel::decoder_logits(Tape& t, int memory, const std::vector<int>& input_ids,
                              const RunFlags& flags) {
  const int m = static_cast<int>(input_ids.size());
  int y = embed_rows(t, t.param(weights_.embed), input_ids);
  // decoder tokens carry no layout: sequential bias only
  const int b1d = bias_from_table(t, t.param(weights_.bias.seq), bucket_grid_1d(m), m);
  for (DecLayer& layer : weights_.dec) {
    const int h = rms_norm(t, y, t.param(layer.self_norm));
    const int a = attention(t, h, h, layer.self_attn, b1d, /*causal=*/true, flags);
    y = add(t, y, maybe_dropout(t, a, flags));
    const int hc = rms_norm(t, y, t.param(layer.cross_norm));
    const int c = attention(t, hc, memory, layer.cross_attn, -1, /*causal=*/false, flags);
    y = add(t, y, maybe_dropout(t, c, flags));
    const int hf = rms_norm(t, y, t.param(layer.ffn_norm));
    const int f = ffn(t, hf, layer.ffn_w1, layer.ffn_w2, flags);
    y = add(t, y, maybe_dropout(t, f, flags));
  }
  y = rms_norm(t, y, t.param(weights_.dec_final_norm));
  // tied output projection
  return matmul_nt(t, y, t.param(weights_.embed));
}

int TiltModel::decode_loss(Tape& t, int memory, const std::vector<int>& target_ids,
                           const RunFlags& flags) {
  TILT_CHECK(!target_ids.empty(), "decode_loss: empty target");
  std::vector<int> input_ids;
  input_ids.reserve(target_ids.size() + 1);
  input_ids.push_back(vocab::kBos);
  input_ids.insert(input_ids.end(), target_ids.begin(), target_ids.end());
  std::vector<int> labels = target_ids;
  labels.push_back(vocab::kEos);
  const int logits = decoder_logits(t, memory, input_ids, flags);
  return cross_entropy_rows(t, logits, labels);
}

int TiltModel::example_loss(Tape& t, const PreparedExample& ex, const RunFlags& flags) {
  const int memory = encode(t, ex, flags);
  return decode_loss(t, memory, ex.target_ids, flags);
}

std::string TiltModel::generate(const PreparedExample& ex, const RunFlags& flags, int max_len) {
  if (max_len < 0) max_len = weights_.cfg.max_tgt_len;
  if (max_len == 0) return "";
  RunFlags eval_flags = flags;
  eval_flags.training = false;
  Tape t;
  const int memory = encode(t, ex, eval_flags);
  std::vector<int> ids = {vocab::kBos};
  std::vector<int> emitted;
  for (int step = 0; step < max_len; ++step) {
    const int logits = decoder_logits(t, memory, ids, eval_flags);
    const Tensor& vl = t.val(logits);
    const int last = vl.dim(0) - 1;
    int best = 0;
    for (int j = 1; j < vl.dim(1); ++j) {
      if (vl.at(last, j) > vl.at(last, best)) best = j;
    }
    if (best == vocab::kEos) break;
    ids.push_back(best);
    emitted.push_back(best);
  }
  return vocab::decode_answer(emitted);
}

}  // namespace tilt
