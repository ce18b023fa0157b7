#include "skp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skp {

double dataset_ce(const Seq2SeqParams& p, const Vocabulary& vocab,
                  const std::vector<PairExample>& examples) {
    double nll = 0.0;
    long tokens = 0;
    for (const auto& ex : examples) {
        long t = 0;
        nll += pair_nll(p, vocab, ex, nullptr, &t);
        tokens += t;
    }
    return tokens > 0 ? nll / static_cast<double>(tokens) : 0.0;
}

Seq2SeqParams train_neural(const std::vector<PairExample>& train,
                           const std::vector<PairExample>& validation, const Vocabulary& vocab,
                           const TrainHyper& hyper, uint64_t seed, TrainReport* report) {
    if (train.empty()) throw std::runtime_error("train_neural: empty training set");

    Rng rng(seed);
    Seq2SeqParams params = Seq2SeqParams::init(vocab.size(), hyper.hidden, hyper.init_range, rng);
    Seq2SeqParams grads = Seq2SeqParams::make(vocab.size(), hyper.hidden);
    Seq2SeqParams rms = Seq2SeqParams::make(vocab.size(), hyper.hidden);

    auto param_refs = tensor_refs(params);
    auto grad_refs = tensor_refs(grads);
    auto rms_refs = tensor_refs(rms);

    Seq2SeqParams best = params;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = -1;

    std::vector<size_t> order(train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_nll = 0.0;
        long epoch_tokens = 0;

        for (size_t start = 0; start < order.size(); start += static_cast<size_t>(hyper.batch_size)) {
            const size_t stop = std::min(order.size(), start + static_cast<size_t>(hyper.batch_size));
            for (auto& ref : grad_refs)
                for (long i = 0; i < ref.size(); ++i) ref.data[i] = 0.0;

            double batch_nll = 0.0;
            long batch_tokens = 0;
            for (size_t bi = start; bi < stop; ++bi) {
                const PairExample& ex = train[order[bi]];
                PairForwardCache cache;
                long t = 0;
                batch_nll += pair_nll(params, vocab, ex, &cache, &t);
                batch_tokens += t;
                pair_backward(params, cache, grads);
            }
            if (!std::isfinite(batch_nll)) throw TrainingDiverged(epoch);
            epoch_nll += batch_nll;
            epoch_tokens += batch_tokens;

            const double scale = 1.0 / static_cast<double>(batch_tokens);
            for (size_t r = 0; r < param_refs.size(); ++r) {
                double* th = param_refs[r].data;
                double* g = grad_refs[r].data;
                double* s = rms_refs[r].data;
                const long n = param_refs[r].size();
                for (long i = 0; i < n; ++i) {
                    const double gi = g[i] * scale;
                    s[i] = hyper.rms_decay * s[i] + (1.0 - hyper.rms_decay) * gi * gi;
                    th[i] -= hyper.learning_rate * gi / (std::sqrt(s[i]) + hyper.rms_epsilon);
                }
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_ce = epoch_tokens > 0 ? epoch_nll / static_cast<double>(epoch_tokens) : 0.0;
        stats.val_ce = validation.empty() ? 0.0 : dataset_ce(params, vocab, validation);
        if (report) report->epochs.push_back(stats);

        if (!validation.empty() && stats.val_ce < best_val) {
            best_val = stats.val_ce;
            best = params;
            best_epoch = epoch;
        }
    }

    if (report) {
        report->validation_empty = validation.empty();
        report->best_epoch = best_epoch;
        report->best_val_ce = validation.empty() ? 0.0 : best_val;
    }
    return validation.empty() ? params : best;
}

}  // namespace skp
