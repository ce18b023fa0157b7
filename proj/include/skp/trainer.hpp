#pragma once

#include <stdexcept>
#include <vector>

#include "skp/seq2seq.hpp"

namespace skp {

struct TrainHyper {
    int hidden = 50;
    int epochs = 50;
    int batch_size = 50;
    double learning_rate = 1e-3;
    double rms_decay = 0.9;
    double rms_epsilon = 1e-8;
    double init_range = 0.08;
};

struct EpochStats {
    int epoch = 0;
    double train_ce = 0.0;  // per-token cross-entropy
    double val_ce = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_ce = 0.0;
    bool validation_empty = false;
};

struct TrainingDiverged : std::runtime_error {
    explicit TrainingDiverged(int epoch)
        : std::runtime_error("training diverged (non-finite loss) at epoch " +
                             std::to_string(epoch)) {}
};

// Per-token validation cross-entropy, forward only.
double dataset_ce(const Seq2SeqParams& p, const Vocabulary& vocab,
                  const std::vector<PairExample>& examples);

// Batched RMSProp over the summed token cross-entropy, normalized per token.
// After each epoch the validation cross-entropy is measured; the parameters
// with the lowest validation loss across all epochs are returned. With an
// empty validation set the final-epoch parameters are returned and the
// report is flagged.
Seq2SeqParams train_neural(const std::vector<PairExample>& train,
                           const std::vector<PairExample>& validation, const Vocabulary& vocab,
                           const TrainHyper& hyper, uint64_t seed, TrainReport* report = nullptr);

}  // namespace skp
