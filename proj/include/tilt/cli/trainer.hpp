#pragma once

#include <ostream>
#include <vector>

#include "tilt/cli/run_config.hpp"
#include "tilt/model/model.hpp"

namespace tilt {

enum class TrainTask { pretrain, finetune };

struct TrainStats {
  int64_t step = 0;
  double loss = 0;
  double lr = 0;
};

// Deterministic single-threaded training loop: epoch-shuffled example order,
// per-example derived rng streams for augmentation and dropout, sequential
// gradient accumulation over the batch.
class Trainer {
 public:
  Trainer(TiltModel& model, std::vector<Document> docs, const RunConfig& cfg, TrainTask task,
          std::ostream* log = nullptr);

  TrainStats step();
  void run(int num_steps = -1);  // -1: cfg.steps

  int64_t steps_done() const { return step_count_; }
  AdamW& optimizer() { return opt_; }
  RunFlags eval_flags() const;

 private:
  struct Item {
    int doc = 0, ann = -1;
    CaseMode mode = CaseMode::identity;
  };

  void rebuild_epoch();
  Seq2SeqExample next_example(Rng& rng);

  TiltModel& model_;
  std::vector<Document> docs_;
  RunConfig cfg_;
  TrainTask task_;
  std::ostream* log_;
  AdamW opt_;
  std::vector<Parameter*> params_;
  Rng base_rng_;
  std::vector<Item> epoch_;
  size_t epoch_pos_ = 0;
  int64_t epoch_count_ = 0;
  int64_t example_count_ = 0;
  int64_t step_count_ = 0;
};

}  // namespace tilt
