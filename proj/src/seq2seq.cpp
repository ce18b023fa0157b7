#include "skp/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace skp {

Seq2SeqParams Seq2SeqParams::make(int vocab_size, int hidden) {
    Seq2SeqParams p;
    p.vocab_size = vocab_size;
    p.hidden = hidden;
    for (auto* stack : {&p.enc_before, &p.enc_after, &p.dec}) {
        stack->layer0 = LstmLayerParams::make(hidden, vocab_size);
        stack->layer1 = LstmLayerParams::make(hidden, hidden);
    }
    p.w_join = Eigen::MatrixXd::Zero(hidden, 2 * hidden);
    p.b_join = Eigen::VectorXd::Zero(hidden);
    for (auto* m : {&p.w_init_c0, &p.w_init_y0, &p.w_init_c1, &p.w_init_y1})
        *m = Eigen::MatrixXd::Zero(hidden, hidden);
    for (auto* v : {&p.b_init_c0, &p.b_init_y0, &p.b_init_c1, &p.b_init_y1})
        *v = Eigen::VectorXd::Zero(hidden);
    p.w_out = Eigen::MatrixXd::Zero(vocab_size, hidden);
    p.b_out = Eigen::VectorXd::Zero(vocab_size);
    return p;
}

Seq2SeqParams Seq2SeqParams::init(int vocab_size, int hidden, double range, Rng& rng) {
    Seq2SeqParams p = make(vocab_size, hidden);
    for (auto& ref : tensor_refs(p))
        for (long i = 0; i < ref.size(); ++i) ref.data[i] = rng.uniform(-range, range);
    return p;
}

std::vector<TensorRef> tensor_refs(Seq2SeqParams& p) {
    std::vector<TensorRef> refs;
    auto add_m = [&](const std::string& name, Eigen::MatrixXd& m) {
        refs.push_back({name, m.data(), m.rows(), m.cols()});
    };
    auto add_v = [&](const std::string& name, Eigen::VectorXd& v) {
        refs.push_back({name, v.data(), v.size(), 1});
    };
    auto add_stack = [&](const std::string& prefix, StackedLstmParams& s) {
        add_m(prefix + ".l0.u", s.layer0.u);
        add_m(prefix + ".l0.v", s.layer0.v);
        add_v(prefix + ".l0.b", s.layer0.b);
        add_m(prefix + ".l1.u", s.layer1.u);
        add_m(prefix + ".l1.v", s.layer1.v);
        add_v(prefix + ".l1.b", s.layer1.b);
    };
    add_stack("enc_before", p.enc_before);
    add_stack("enc_after", p.enc_after);
    add_stack("dec", p.dec);
    add_m("join.w", p.w_join);
    add_v("join.b", p.b_join);
    add_m("init.c0.w", p.w_init_c0);
    add_v("init.c0.b", p.b_init_c0);
    add_m("init.y0.w", p.w_init_y0);
    add_v("init.y0.b", p.b_init_y0);
    add_m("init.c1.w", p.w_init_c1);
    add_v("init.c1.b", p.b_init_c1);
    add_m("init.y1.w", p.w_init_y1);
    add_v("init.y1.b", p.b_init_y1);
    add_m("out.w", p.w_out);
    add_v("out.b", p.b_out);
    return refs;
}

Eigen::VectorXd encode_sequence(const StackedLstmParams& p, const std::vector<int>& ids,
                                StackedSeqCache* cache) {
    if (ids.empty()) throw std::invalid_argument("encode_sequence: empty token sequence");
    const int h = p.layer0.hidden();
    LstmState s0 = LstmState::zero(h), s1 = LstmState::zero(h);
    if (cache) {
        cache->steps0.resize(ids.size());
        cache->steps1.resize(ids.size());
    }
    for (size_t t = 0; t < ids.size(); ++t) {
        s0 = lstm_step(p.layer0, ids[t], s0, cache ? &cache->steps0[t] : nullptr);
        s1 = lstm_step_dense(p.layer1, s0.y, s1, cache ? &cache->steps1[t] : nullptr);
    }
    return s1.y;
}

Eigen::VectorXd context_vector(const Seq2SeqParams& p, const Eigen::VectorXd& h_before,
                               const Eigen::VectorXd& h_after) {
    Eigen::VectorXd concat(2 * p.hidden);
    concat << h_before, h_after;
    Eigen::VectorXd vc = p.b_join;
    vc.noalias() += p.w_join * concat;
    return vc;
}

StackedState initial_decoder_state(const Seq2SeqParams& p, const Eigen::VectorXd& vc) {
    StackedState s;
    s.l0.c = p.b_init_c0;
    s.l0.c.noalias() += p.w_init_c0 * vc;
    s.l0.y = p.b_init_y0;
    s.l0.y.noalias() += p.w_init_y0 * vc;
    s.l1.c = p.b_init_c1;
    s.l1.c.noalias() += p.w_init_c1 * vc;
    s.l1.y = p.b_init_y1;
    s.l1.y.noalias() += p.w_init_y1 * vc;
    return s;
}

Eigen::VectorXd decoder_step(const Seq2SeqParams& p, int token_id, StackedState& state,
                             DecStepCache* cache) {
    state.l0 = lstm_step(p.dec.layer0, token_id, state.l0, cache ? &cache->s0 : nullptr);
    state.l1 = lstm_step_dense(p.dec.layer1, state.l0.y, state.l1, cache ? &cache->s1 : nullptr);
    Eigen::VectorXd logits = p.b_out;
    logits.noalias() += p.w_out * state.l1.y;
    return logits;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::ArrayXd e = (logits.array() - m).exp();
    return (e / e.sum()).matrix();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::ArrayXd shifted = logits.array() - m;
    const double lse = std::log(shifted.exp().sum());
    return (shifted - lse).matrix();
}

std::vector<int> statement_ids(const Vocabulary& vocab, const TokenStatement& stmt) {
    return vocab.encode(model_tokens(stmt));
}

PairExample to_example(const TrainingPair& pair, const Vocabulary& vocab) {
    return {statement_ids(vocab, pair.x), statement_ids(vocab, pair.xp),
            statement_ids(vocab, pair.y)};
}

double pair_nll(const Seq2SeqParams& p, const Vocabulary& vocab, const PairExample& ex,
                PairForwardCache* cache, long* token_count) {
    PairForwardCache local;
    PairForwardCache& fc = cache ? *cache : local;

    fc.h_before = encode_sequence(p.enc_before, ex.before, &fc.enc_before);
    fc.h_after = encode_sequence(p.enc_after, ex.after, &fc.enc_after);
    fc.concat.resize(2 * p.hidden);
    fc.concat << fc.h_before, fc.h_after;
    fc.vc = p.b_join;
    fc.vc.noalias() += p.w_join * fc.concat;
    fc.init_state = initial_decoder_state(p, fc.vc);

    fc.inputs.clear();
    fc.inputs.push_back(vocab.bos_id());
    fc.inputs.insert(fc.inputs.end(), ex.target.begin(), ex.target.end());
    fc.targets = ex.target;
    fc.targets.push_back(vocab.eos_id());

    const size_t steps = fc.inputs.size();
    fc.dec_steps.resize(steps);
    fc.step_probs.resize(steps);

    StackedState state = fc.init_state;
    double nll = 0.0;
    for (size_t t = 0; t < steps; ++t) {
        Eigen::VectorXd logits = decoder_step(p, fc.inputs[t], state, &fc.dec_steps[t]);
        Eigen::VectorXd lp = log_softmax(logits);
        nll -= lp[fc.targets[t]];
        fc.step_probs[t] = lp.array().exp().matrix();
    }
    if (token_count) *token_count = static_cast<long>(steps);
    return nll;
}

namespace {

// Backward pass over a stacked sequence. d_top_y is the gradient w.r.t. the
// final top-layer output; per-step gradients on the top layer's y may be
// supplied for the decoder (extra_dy1, indexed by step).
void stacked_backward(const StackedLstmParams& p, const StackedSeqCache& cache,
                      Eigen::VectorXd d_top_y, StackedLstmParams& grads,
                      const std::vector<Eigen::VectorXd>* extra_dy1,
                      Eigen::VectorXd* d_init_c0, Eigen::VectorXd* d_init_y0,
                      Eigen::VectorXd* d_init_c1, Eigen::VectorXd* d_init_y1) {
    const int h = p.layer0.hidden();
    const size_t steps = cache.steps0.size();
    Eigen::VectorXd dc1 = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd dy1 = std::move(d_top_y);
    Eigen::VectorXd dc0 = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd dy0 = Eigen::VectorXd::Zero(h);

    Eigen::VectorXd dx1(h);
    for (size_t t = steps; t-- > 0;) {
        if (extra_dy1 && (*extra_dy1)[t].size() > 0) dy1 += (*extra_dy1)[t];
        lstm_step_backward(p.layer1, cache.steps1[t], dc1, dy1, grads.layer1, &dx1);
        // layer 1's input is layer 0's output at the same step
        dy0 += dx1;
        lstm_step_backward(p.layer0, cache.steps0[t], dc0, dy0, grads.layer0, nullptr);
    }
    if (d_init_c0) *d_init_c0 = dc0;
    if (d_init_y0) *d_init_y0 = dy0;
    if (d_init_c1) *d_init_c1 = dc1;
    if (d_init_y1) *d_init_y1 = dy1;
}

}  // namespace

void pair_backward(const Seq2SeqParams& p, const PairForwardCache& fc, Seq2SeqParams& grads) {
    const int h = p.hidden;
    const size_t steps = fc.inputs.size();

    // Per-step gradients flowing into the decoder top layer via the logits.
    std::vector<Eigen::VectorXd> extra_dy1(steps);
    for (size_t t = 0; t < steps; ++t) {
        Eigen::VectorXd dlogits = fc.step_probs[t];
        dlogits[fc.targets[t]] -= 1.0;
        grads.b_out += dlogits;
        grads.w_out.noalias() += dlogits * fc.dec_steps[t].s1.y.transpose();
        extra_dy1[t].noalias() = p.w_out.transpose() * dlogits;
    }

    StackedSeqCache dec_cache;
    dec_cache.steps0.reserve(steps);
    dec_cache.steps1.reserve(steps);
    for (const auto& s : fc.dec_steps) {
        dec_cache.steps0.push_back(s.s0);
        dec_cache.steps1.push_back(s.s1);
    }

    Eigen::VectorXd d_init_c0, d_init_y0, d_init_c1, d_init_y1;
    stacked_backward(p.dec, dec_cache, Eigen::VectorXd::Zero(h), grads.dec, &extra_dy1,
                     &d_init_c0, &d_init_y0, &d_init_c1, &d_init_y1);

    // Initial-state heads.
    Eigen::VectorXd dvc = Eigen::VectorXd::Zero(h);
    grads.w_init_c0.noalias() += d_init_c0 * fc.vc.transpose();
    grads.b_init_c0 += d_init_c0;
    dvc.noalias() += p.w_init_c0.transpose() * d_init_c0;
    grads.w_init_y0.noalias() += d_init_y0 * fc.vc.transpose();
    grads.b_init_y0 += d_init_y0;
    dvc.noalias() += p.w_init_y0.transpose() * d_init_y0;
    grads.w_init_c1.noalias() += d_init_c1 * fc.vc.transpose();
    grads.b_init_c1 += d_init_c1;
    dvc.noalias() += p.w_init_c1.transpose() * d_init_c1;
    grads.w_init_y1.noalias() += d_init_y1 * fc.vc.transpose();
    grads.b_init_y1 += d_init_y1;
    dvc.noalias() += p.w_init_y1.transpose() * d_init_y1;

    // Join layer.
    grads.w_join.noalias() += dvc * fc.concat.transpose();
    grads.b_join += dvc;
    Eigen::VectorXd dconcat = p.w_join.transpose() * dvc;

    stacked_backward(p.enc_before, fc.enc_before, dconcat.segment(0, h), grads.enc_before,
                     nullptr, nullptr, nullptr, nullptr, nullptr);
    stacked_backward(p.enc_after, fc.enc_after, dconcat.segment(h, h), grads.enc_after,
                     nullptr, nullptr, nullptr, nullptr, nullptr);
}

std::vector<BeamHyp> decode_beam(const Seq2SeqParams& p, const Vocabulary& vocab,
                                 const Eigen::VectorXd& vc, int k, int l_max) {
    if (k < 1) throw std::invalid_argument("decode_beam: k must be >= 1");
    const int eos = vocab.eos_id();
    const int bos = vocab.bos_id();
    const int unk = vocab.unk_id();

    struct Open {
        std::vector<int> tokens;
        double logprob;
        StackedState state;
        int last_token;
        bool completed;  // EOS reached; competes for a slot, then retires
    };

    auto better = [](const Open& a, const Open& b) {
        if (a.logprob != b.logprob) return a.logprob > b.logprob;
        if (a.tokens != b.tokens) return a.tokens < b.tokens;
        return a.completed && !b.completed;
    };

    std::vector<Open> open;
    open.push_back({{}, 0.0, initial_decoder_state(p, vc), bos, false});
    std::vector<BeamHyp> done;

    // A statement may use up to l_max tokens; EOS takes one extra step.
    // Completed prefixes take part in the per-step top-k pruning and then
    // permanently retire their slot, so at most k candidates ever finish and
    // beam width 1 reduces to greedy decoding.
    int slots = k;
    for (int step = 0; step <= l_max && !open.empty() && slots > 0; ++step) {
        const bool last_round = step == l_max;
        std::vector<Open> expansions;
        for (auto& hyp : open) {
            StackedState state = hyp.state;
            Eigen::VectorXd logits = decoder_step(p, hyp.last_token, state);
            logits[bos] = -std::numeric_limits<double>::infinity();
            logits[unk] = -std::numeric_limits<double>::infinity();
            Eigen::VectorXd lp = log_softmax(logits);

            expansions.push_back({hyp.tokens, hyp.logprob + lp[eos], {}, eos, true});
            if (last_round) continue;
            for (int tok = 0; tok < vocab.size(); ++tok) {
                if (tok == eos || tok == bos || tok == unk) continue;
                Open ext;
                ext.tokens = hyp.tokens;
                ext.tokens.push_back(tok);
                ext.logprob = hyp.logprob + lp[tok];
                ext.state = state;
                ext.last_token = tok;
                ext.completed = false;
                expansions.push_back(std::move(ext));
            }
        }
        std::sort(expansions.begin(), expansions.end(), better);
        if (static_cast<int>(expansions.size()) > slots)
            expansions.resize(static_cast<size_t>(slots));
        open.clear();
        for (auto& e : expansions) {
            if (e.completed) {
                done.push_back({std::move(e.tokens), e.logprob});
                --slots;
            } else {
                open.push_back(std::move(e));
            }
        }
    }

    std::sort(done.begin(), done.end(), [](const BeamHyp& a, const BeamHyp& b) {
        if (a.logprob != b.logprob) return a.logprob > b.logprob;
        return a.tokens < b.tokens;
    });
    return done;
}

Eigen::VectorXd encode_statement(const Seq2SeqParams& p, const Vocabulary& vocab,
                                 const TokenStatement& stmt, EncoderSide side) {
    const auto ids = statement_ids(vocab, stmt);
    return encode_sequence(side == EncoderSide::before ? p.enc_before : p.enc_after, ids);
}

Eigen::VectorXd fragment_context(const Seq2SeqParams& p, const Vocabulary& vocab,
                                 const PartialFragment& frag) {
    return context_vector(p, encode_statement(p, vocab, frag.before, EncoderSide::before),
                          encode_statement(p, vocab, frag.after, EncoderSide::after));
}

}  // namespace skp
