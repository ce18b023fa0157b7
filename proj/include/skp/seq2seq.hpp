#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skp/corpus.hpp"
#include "skp/lstm.hpp"
#include "skp/model.hpp"
#include "skp/rng.hpp"
#include "skp/vocab.hpp"

namespace skp {

// Two-layer stack: layer 0 consumes one-hot tokens, layer 1 consumes layer
// 0's output vector at the same timestep.
struct StackedLstmParams {
    LstmLayerParams layer0;
    LstmLayerParams layer1;
};

struct StackedState {
    LstmState l0, l1;
    static StackedState zero(int hidden) {
        return {LstmState::zero(hidden), LstmState::zero(hidden)};
    }
};

// Full statement-prediction network: two independent encoders (one per
// context statement), a join layer producing the context vector v_C, linear
// heads seeding both decoder layers' initial states from v_C, and a decoder
// with an output projection over the vocabulary.
struct Seq2SeqParams {
    int vocab_size = 0;
    int hidden = 0;

    StackedLstmParams enc_before, enc_after, dec;

    Eigen::MatrixXd w_join;  // H x 2H
    Eigen::VectorXd b_join;  // H

    Eigen::MatrixXd w_init_c0, w_init_y0, w_init_c1, w_init_y1;  // H x H
    Eigen::VectorXd b_init_c0, b_init_y0, b_init_c1, b_init_y1;  // H

    Eigen::MatrixXd w_out;  // N x H
    Eigen::VectorXd b_out;  // N

    static Seq2SeqParams make(int vocab_size, int hidden);
    static Seq2SeqParams init(int vocab_size, int hidden, double range, Rng& rng);
};

// Flat view over every parameter tensor, in a fixed order. Shared by the
// optimizer, the serializer and the gradient checks.
struct TensorRef {
    std::string name;
    double* data;
    long rows, cols;
    long size() const { return rows * cols; }
};
std::vector<TensorRef> tensor_refs(Seq2SeqParams& p);

// --- forward ---------------------------------------------------------------

struct StackedSeqCache {
    std::vector<LstmStepCache> steps0, steps1;
};

// Runs a stacked LSTM over a token sequence from the all-zero state and
// returns the final top-layer output (the statement summary). Encoder
// outputs at intermediate steps are discarded.
Eigen::VectorXd encode_sequence(const StackedLstmParams& p, const std::vector<int>& ids,
                                StackedSeqCache* cache = nullptr);

// v_C = W . concat(h_before, h_after) + b
Eigen::VectorXd context_vector(const Seq2SeqParams& p, const Eigen::VectorXd& h_before,
                               const Eigen::VectorXd& h_after);

StackedState initial_decoder_state(const Seq2SeqParams& p, const Eigen::VectorXd& vc);

struct DecStepCache {
    LstmStepCache s0, s1;
};

// One decoder step: consumes a token id, advances the state, returns logits.
Eigen::VectorXd decoder_step(const Seq2SeqParams& p, int token_id, StackedState& state,
                             DecStepCache* cache = nullptr);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

// --- training loss ----------------------------------------------------------

// One training pair vectorized against the vocabulary. `target` excludes the
// end-of-statement symbol; the loss appends it.
struct PairExample {
    std::vector<int> before, after, target;
};

struct PairForwardCache {
    StackedSeqCache enc_before, enc_after;
    Eigen::VectorXd h_before, h_after, concat, vc;
    StackedState init_state;
    std::vector<DecStepCache> dec_steps;
    std::vector<Eigen::VectorXd> step_probs;
    std::vector<int> inputs, targets;
};

// Summed token negative log-likelihood of the target statement given the
// fragment. token_count receives |target| + 1 (the EOS step).
double pair_nll(const Seq2SeqParams& p, const Vocabulary& vocab, const PairExample& ex,
                PairForwardCache* cache = nullptr, long* token_count = nullptr);

// Backprop of pair_nll into `grads` (accumulating).
void pair_backward(const Seq2SeqParams& p, const PairForwardCache& cache, Seq2SeqParams& grads);

// --- beam search ------------------------------------------------------------

struct BeamHyp {
    std::vector<int> tokens;  // statement tokens, EOS excluded
    double logprob = 0.0;
};

// Deterministic width-k beam search from a context vector. Keeps the k most
// probable open prefixes per step; prefixes that emit EOS are completed.
// Statements are capped at l_max tokens. BOS and UNK are masked and never
// emitted. Completed candidates are returned sorted by probability
// (ties: lexicographic token order), at most k of them.
std::vector<BeamHyp> decode_beam(const Seq2SeqParams& p, const Vocabulary& vocab,
                                 const Eigen::VectorXd& vc, int k, int l_max);

// --- statement-level helpers --------------------------------------------------

enum class EncoderSide { before, after };

Eigen::VectorXd encode_statement(const Seq2SeqParams& p, const Vocabulary& vocab,
                                 const TokenStatement& stmt, EncoderSide side);

Eigen::VectorXd fragment_context(const Seq2SeqParams& p, const Vocabulary& vocab,
                                 const PartialFragment& frag);

PairExample to_example(const TrainingPair& pair, const Vocabulary& vocab);

// Vectorizes a statement for the model: model tokens mapped through the
// vocabulary with UNK fallback.
std::vector<int> statement_ids(const Vocabulary& vocab, const TokenStatement& stmt);

}  // namespace skp
