#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tilt/model/weights.hpp"
#include "tilt/objectives/objectives.hpp"

namespace tilt {

struct RunFlags {
  bool use_spatial_bias = true;  // when off, encoder attention runs unbiased
  bool use_vision = true;        // when off, U = 0 even for image-bearing pages
  bool training = false;         // enables dropout
  Rng* dropout_rng = nullptr;    // required when training with dropout > 0
};

// A Seq2SeqExample lowered to model inputs: byte/sentinel ids with one bbox
// per position, everything rescaled to the configured raster space.
struct PreparedExample {
  std::vector<int> src_ids;
  std::vector<BBox> src_boxes;
  std::vector<GridCell> centers;
  std::vector<int> target_ids;
  std::optional<ImageGray> image;
  int page_w = 0, page_h = 0;
  bool truncated = false;  // document tail dropped; the prompt always survives
};

// Encoder-decoder over text, layout and vision. Encoder self-attention adds
// the bucketed bias B = B1D + BH + BV and the image embeddings U enter once
// as X = S + U; the decoder is causal with the sequential bias term only,
// cross-attention is unbiased.
class TiltModel {
 public:
  TiltModel(const TiltConfig& cfg, uint64_t seed)
      : weights_(ModelWeights::make(cfg, seed)) {}
  explicit TiltModel(ModelWeights weights) : weights_(std::move(weights)) {}

  const TiltConfig& config() const { return weights_.cfg; }
  ModelWeights& weights() { return weights_; }
  std::vector<Parameter*> params() { return weights_.all(); }

  PreparedExample prepare(const Seq2SeqExample& ex, const RunFlags& flags) const;

  // -> memory node [n, d_model]
  int encode(Tape& t, const PreparedExample& ex, const RunFlags& flags);

  // Teacher-forced mean cross-entropy. target must be non-empty.
  int decode_loss(Tape& t, int memory, const std::vector<int>& target_ids,
                  const RunFlags& flags);

  int example_loss(Tape& t, const PreparedExample& ex, const RunFlags& flags);

  // Next-token logits for a (bos-prefixed) decoder input -> [len, vocab].
  int decoder_logits(Tape& t, int memory, const std::vector<int>& input_ids,
                     const RunFlags& flags);

  // Greedy decode; max_len < 0 means config max_tgt_len.
  std::string generate(const PreparedExample& ex, const RunFlags& flags, int max_len = -1);

 private:
  int attention(Tape& t, int q_in, int kv_in, AttnWeights& w, int bias_node, bool causal,
                const RunFlags& flags);
  int ffn(Tape& t, int x, Parameter& w1, Parameter& w2, const RunFlags& flags);
  int maybe_dropout(Tape& t, int x, const RunFlags& flags);

  ModelWeights weights_;
};

}  // namespace tilt
