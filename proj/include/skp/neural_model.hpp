#pragma once

#include <memory>

#include "skp/seq2seq.hpp"

namespace skp {

// PredictionModel adapter over a trained network. Beam hypotheses are parsed
// back into statements (leading indent tokens set the depth, a lone eps or
// an empty sequence is epsilon); hypotheses that collapse to the same
// statement pool their probability.
class NeuralModel : public PredictionModel {
public:
    NeuralModel(Seq2SeqParams params, Vocabulary vocab, int l_max)
        : params_(std::move(params)), vocab_(std::move(vocab)), l_max_(l_max) {}

    PredictionList predict(const PartialFragment& frag, int k) const override;

    const Seq2SeqParams& params() const { return params_; }
    const Vocabulary& vocab() const { return vocab_; }
    int l_max() const { return l_max_; }

private:
    Seq2SeqParams params_;
    Vocabulary vocab_;
    int l_max_;
};

}  // namespace skp
