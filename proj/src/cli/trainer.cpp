#include "tilt/cli/trainer.hpp"

#include "tilt/bias/spatial_bias.hpp"
#include "tilt/vision/augment.hpp"

namespace tilt {

Trainer::Trainer(TiltModel& model, std::vector<Document> docs, const RunConfig& cfg,
                 TrainTask task, std::ostream* log)
    : model_(model),
      docs_(std::move(docs)),
      cfg_(cfg),
      task_(task),
      log_(log),
      opt_(cfg.optim),
      params_(model.params()),
      base_rng_(cfg.seed) {
  TILT_CHECK(!docs_.empty(), "training corpus is empty");
  rebuild_epoch();
  TILT_CHECK(!epoch_.empty(), "no trainable examples (finetune needs annotated documents)");
}

RunFlags Trainer::eval_flags() const {
  RunFlags f;
  f.use_spatial_bias = !cfg_.ablate.disable_spatial_bias;
  f.use_vision = !cfg_.ablate.disable_vision;
  f.training = false;
  return f;
}

void Trainer::rebuild_epoch() {
  epoch_.clear();
  const std::vector<CaseMode> modes =
      cfg_.augment.case_aug
          ? std::vector<CaseMode>{CaseMode::identity, CaseMode::lower, CaseMode::upper}
          : std::vector<CaseMode>{CaseMode::identity};
  for (int d = 0; d < static_cast<int>(docs_.size()); ++d) {
    if (task_ == TrainTask::pretrain) {
      for (CaseMode m : modes) epoch_.push_back({d, -1, m});
    } else {
      for (int a = 0; a < static_cast<int>(docs_[static_cast<size_t>(d)].annotations.size()); ++a)
        for (CaseMode m : modes) epoch_.push_back({d, a, m});
    }
  }
  Rng shuffle_rng = base_rng_.derive(0x45504F43 + static_cast<uint64_t>(epoch_count_));
  shuffle_rng.shuffle(epoch_);
  epoch_pos_ = 0;
  ++epoch_count_;
}

Seq2SeqExample Trainer::next_example(Rng& rng) {
  if (epoch_pos_ >= epoch_.size()) rebuild_epoch();
  const Item item = epoch_[epoch_pos_++];
  Document doc = docs_[static_cast<size_t>(item.doc)];
  if (cfg_.augment.affine) {
    affine_augment(doc, AffineBounds{}, cfg_.augment.affine_prob, rng);
  }
  if (cfg_.augment.spatial) {
    doc = spatial_scale_augment(doc, rng);
  }
  Seq2SeqExample ex;
  if (task_ == TrainTask::pretrain) {
    const std::vector<Span> spans = salient_spans(doc, rng);
    ex = span_corrupt(doc, spans, rng, cfg_.augment.image_mask_prob);
  } else {
    ex = to_seq2seq(doc, doc.annotations[static_cast<size_t>(item.ann)]);
  }
  return case_augment(ex, item.mode);
}

TrainStats Trainer::step() {
  RunFlags flags = eval_flags();
  flags.training = true;

  const real lr = cfg_.schedule == ScheduleKind::linear
                      ? lr_linear(step_count_, cfg_.steps, cfg_.optim.lr)
                      : cfg_.optim.lr;
  model_.weights().zero_grads();
  double loss_sum = 0;
  for (int b = 0; b < cfg_.batch_size; ++b) {
    Rng ex_rng = base_rng_.derive(2 * static_cast<uint64_t>(example_count_));
    Rng dropout_rng = base_rng_.derive(2 * static_cast<uint64_t>(example_count_) + 1);
    ++example_count_;
    flags.dropout_rng = &dropout_rng;
    const Seq2SeqExample ex = next_example(ex_rng);
    const PreparedExample prepared = model_.prepare(ex, flags);
    Tape tape;
    const int loss = model_.example_loss(tape, prepared, flags);
    loss_sum += static_cast<double>(tape.val(loss)[0]);
    tape.backward(loss, real(1) / static_cast<real>(cfg_.batch_size));
  }
  opt_.step(params_, lr);
  ++step_count_;

  TrainStats stats{step_count_, loss_sum / cfg_.batch_size, static_cast<double>(lr)};
  if (log_) {
    *log_ << "{\"step\": " << stats.step << ", \"loss\": " << stats.loss
          << ", \"lr\": " << stats.lr << "}\n";
  }
  return stats;
}

void Trainer::run(int num_steps) {
  const int total = num_steps < 0 ? cfg_.steps : num_steps;
  for (int s = 0; s < total; ++s) step();
}

}  // namespace tilt
