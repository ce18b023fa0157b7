#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "skp/neural_model.hpp"
#include "skp/trainer.hpp"

using namespace skp;

namespace {

Vocabulary tiny_vocab() { return Vocabulary::build({"a", "b"}); }

PairExample simple_example(const Vocabulary& v) {
    PairExample ex;
    ex.before = {v.id("a")};
    ex.after = {v.id("b")};
    ex.target = {v.id("b"), v.id("a")};
    return ex;
}

}  // namespace

TEST_CASE("encoding is deterministic and encoder-specific") {
    Vocabulary vocab = tiny_vocab();
    Rng rng(3);
    auto p = Seq2SeqParams::init(vocab.size(), 6, 0.08, rng);
    TokenStatement s{{"a", "b", "a"}, 1};
    auto h1 = encode_statement(p, vocab, s, EncoderSide::before);
    auto h2 = encode_statement(p, vocab, s, EncoderSide::before);
    CHECK((h1 - h2).norm() == 0.0);
    auto h3 = encode_statement(p, vocab, s, EncoderSide::after);
    CHECK((h1 - h3).norm() > 1e-12);
}

TEST_CASE("empty statement encodes as the single eps token") {
    Vocabulary vocab = tiny_vocab();
    Rng rng(3);
    auto p = Seq2SeqParams::init(vocab.size(), 6, 0.08, rng);
    auto h_eps = encode_statement(p, vocab, TokenStatement::eps(), EncoderSide::before);
    auto h_tok = encode_sequence(p.enc_before, {vocab.eps_id()});
    CHECK((h_eps - h_tok).norm() == 0.0);
}

TEST_CASE("encoder state after t tokens depends only on the prefix") {
    Vocabulary vocab = tiny_vocab();
    Rng rng(12);
    auto p = Seq2SeqParams::init(vocab.size(), 5, 0.08, rng);
    std::vector<int> full{vocab.id("a"), vocab.id("b"), vocab.id("a"), vocab.id("b")};
    for (size_t t = 1; t <= full.size(); ++t) {
        std::vector<int> prefix(full.begin(), full.begin() + static_cast<long>(t));
        StackedSeqCache cache;
        encode_sequence(p.enc_before, full, &cache);
        auto via_prefix = encode_sequence(p.enc_before, prefix);
        CHECK((cache.steps1[t - 1].y - via_prefix).norm() == 0.0);
    }
}

TEST_CASE("context vector is the join bias under zero parameters") {
    Vocabulary vocab = tiny_vocab();
    auto p = Seq2SeqParams::make(vocab.size(), 4);
    p.b_join = Eigen::VectorXd::LinSpaced(4, 0.1, 0.4);
    PartialFragment frag{TokenStatement{{"a"}, 0}, TokenStatement{{"b"}, 0}};
    auto vc = fragment_context(p, vocab, frag);
    CHECK((vc - p.b_join).norm() == 0.0);
}

TEST_CASE("swapping fragment statements changes the context vector") {
    Vocabulary vocab = tiny_vocab();
    Rng rng(21);
    auto p = Seq2SeqParams::init(vocab.size(), 6, 0.08, rng);
    PartialFragment fw{TokenStatement{{"a"}, 0}, TokenStatement{{"b"}, 0}};
    PartialFragment bw{TokenStatement{{"b"}, 0}, TokenStatement{{"a"}, 0}};
    CHECK((fragment_context(p, vocab, fw) - fragment_context(p, vocab, bw)).norm() > 1e-12);
}

TEST_CASE("beam with full width reproduces brute-force enumeration") {
    Vocabulary vocab = tiny_vocab();  // emittable alphabet: eps, indent, start, end, a, b
    Rng rng(31);
    for (int trial = 0; trial < 3; ++trial) {
        auto p = Seq2SeqParams::init(vocab.size(), 5, 0.4, rng);
        auto vc = fragment_context(
            p, vocab, {TokenStatement{{"a"}, 0}, TokenStatement{{"b"}, 0}});
        const int l_max = 2;
        auto oracle = testing::brute_force_sequences(p, vocab, vc, l_max);
        auto beam = decode_beam(p, vocab, vc, static_cast<int>(oracle.size()), l_max);
        REQUIRE(beam.size() == oracle.size());
        for (size_t i = 0; i < beam.size(); ++i) {
            CHECK(beam[i].tokens == oracle[i].tokens);
            CHECK(std::exp(beam[i].logprob) ==
                  doctest::Approx(std::exp(oracle[i].logprob)).epsilon(1e-9));
        }
    }
}

TEST_CASE("beam width one is greedy decoding") {
    Vocabulary vocab = tiny_vocab();
    Rng rng(41);
    auto p = Seq2SeqParams::init(vocab.size(), 5, 0.4, rng);
    auto vc = fragment_context(p, vocab, {TokenStatement{{"b"}, 0}, TokenStatement{{"a"}, 0}});
    auto beam = decode_beam(p, vocab, vc, 1, 3);
    REQUIRE(beam.size() == 1);

    // greedy rollout
    std::vector<int> greedy;
    StackedState state = initial_decoder_state(p, vc);
    int prev = vocab.bos_id();
    for (int step = 0; step <= 3; ++step) {
        Eigen::VectorXd logits = decoder_step(p, prev, state);
        logits[vocab.bos_id()] = -std::numeric_limits<double>::infinity();
        logits[vocab.unk_id()] = -std::numeric_limits<double>::infinity();
        int best = 0;
        logits.maxCoeff(&best);
        if (best == vocab.eos_id()) break;
        if (step == 3) break;
        greedy.push_back(best);
        prev = best;
    }
    CHECK(beam[0].tokens == greedy);
}

TEST_CASE("prediction lists are sorted with genuine probabilities") {
    Vocabulary vocab = tiny_vocab();
    Rng rng(51);
    auto p = Seq2SeqParams::init(vocab.size(), 6, 0.3, rng);
    NeuralModel model(p, vocab, 3);
    auto preds = model.predict({TokenStatement{{"a"}, 0}, TokenStatement{{"b"}, 0}}, 5);
    REQUIRE_FALSE(preds.empty());
    for (size_t i = 0; i + 1 < preds.size(); ++i)
        CHECK(preds.candidates[i].prob >= preds.candidates[i + 1].prob);
    for (const auto& c : preds.candidates) {
        CHECK(c.prob > 0.0);
        CHECK(c.prob <= 1.0);
    }
}

TEST_CASE("initial loss is close to log vocab size") {
    Vocabulary vocab = Vocabulary::build({"a", "b", "c", "d", "e"});
    Rng rng(61);
    auto p = Seq2SeqParams::init(vocab.size(), 8, 0.05, rng);
    PairExample ex = simple_example(vocab);
    long tokens = 0;
    double nll = pair_nll(p, vocab, ex, nullptr, &tokens);
    const double per_token = nll / static_cast<double>(tokens);
    CHECK(per_token == doctest::Approx(std::log(vocab.size())).epsilon(0.15));
}

TEST_CASE("training memorizes a single repeated pair") {
    Vocabulary vocab = tiny_vocab();
    PairExample ex = simple_example(vocab);
    std::vector<PairExample> train(64, ex), val{ex};
    TrainHyper hyper;
    hyper.hidden = 16;
    hyper.epochs = 50;
    hyper.batch_size = 16;
    hyper.learning_rate = 5e-3;
    TrainReport report;
    auto params = train_neural(train, val, vocab, hyper, 7, &report);
    CHECK(report.best_epoch > 0);
    CHECK(report.best_val_ce < 0.05);
    CHECK(dataset_ce(params, vocab, val) < 0.05);
}

TEST_CASE("training with a fixed seed is bit-identical") {
    Vocabulary vocab = tiny_vocab();
    PairExample ex = simple_example(vocab);
    PairExample ex2;
    ex2.before = {vocab.id("b")};
    ex2.after = {vocab.id("a")};
    ex2.target = {vocab.id("a")};
    std::vector<PairExample> train{ex, ex2, ex, ex2}, val{ex};
    TrainHyper hyper;
    hyper.hidden = 6;
    hyper.epochs = 4;
    hyper.batch_size = 2;

    auto a = train_neural(train, val, vocab, hyper, 42);
    auto b = train_neural(train, val, vocab, hyper, 42);
    auto ra = tensor_refs(a), rb = tensor_refs(b);
    REQUIRE(ra.size() == rb.size());
    for (size_t r = 0; r < ra.size(); ++r) {
        REQUIRE(ra[r].size() == rb[r].size());
        for (long i = 0; i < ra[r].size(); ++i) CHECK(ra[r].data[i] == rb[r].data[i]);
    }
}

TEST_CASE("out-of-vocabulary tokens map to UNK but UNK is never emitted") {
    Vocabulary vocab = tiny_vocab();
    CHECK(statement_ids(vocab, TokenStatement{{"a", "zzz"}, 0}) ==
          std::vector<int>{vocab.id("a"), vocab.unk_id()});
    Rng rng(71);
    auto p = Seq2SeqParams::init(vocab.size(), 6, 0.4, rng);
    // push UNK's output weight up hard; masking must still exclude it
    p.b_out[vocab.unk_id()] = 50.0;
    NeuralModel model(p, vocab, 3);
    auto preds = model.predict({TokenStatement{{"zzz"}, 0}, TokenStatement{{"a"}, 0}}, 8);
    REQUIRE_FALSE(preds.empty());
    for (const auto& c : preds.candidates)
        for (const auto& t : c.stmt.tokens) CHECK(t != tok::kUnk);
}

TEST_CASE("empty validation falls back to final-epoch parameters with a warning") {
    Vocabulary vocab = tiny_vocab();
    PairExample ex = simple_example(vocab);
    std::vector<PairExample> train(8, ex);
    TrainHyper hyper;
    hyper.hidden = 5;
    hyper.epochs = 3;
    hyper.batch_size = 4;
    TrainReport report;
    auto params = train_neural(train, {}, vocab, hyper, 3, &report);
    CHECK(report.validation_empty);
    CHECK(report.best_epoch == -1);
    CHECK(params.hidden == 5);
    CHECK(report.epochs.size() == 3);
}

TEST_CASE("divergence raises an error") {
    Vocabulary vocab = tiny_vocab();
    PairExample ex = simple_example(vocab);
    std::vector<PairExample> train(8, ex);
    TrainHyper hyper;
    hyper.hidden = 4;
    hyper.epochs = 3;
    hyper.learning_rate = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(train_neural(train, {}, vocab, hyper, 1), TrainingDiverged);
}
