#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "skp/corpus.hpp"
#include "skp/rng.hpp"
#include "skp/tokenizer.hpp"

using namespace skp;

namespace {

std::vector<Submission> make_subs(int n) {
    std::vector<Submission> subs;
    for (int i = 0; i < n; ++i)
        subs.push_back({"s" + std::to_string(i), i, "src" + std::to_string(i), "a"});
    return subs;
}

Verdict verdict_of(bool ok) { return ok ? Verdict::ok() : Verdict::fail(FailureKind::semantic); }

std::vector<TokenStatement> body_of(const std::string& src) { return tokenize(src); }

}  // namespace

TEST_CASE("split puts the first 90% early and the rest late") {
    auto subs = make_subs(100);
    auto split = split_dataset(subs, [](const std::string&) { return Verdict::ok(); });
    CHECK(split.early_total == 90);
    CHECK(split.late_total == 10);
    // all early correct -> 81 train, 9 validation
    CHECK(split.train.size() == 81);
    CHECK(split.validation.size() == 9);
    // late correct programs are discarded
    CHECK(split.test.empty());
    CHECK(split.late_correct == 10);
}

TEST_CASE("split keeps late incorrect programs as the test set") {
    auto subs = make_subs(100);
    auto split = split_dataset(subs, [](const std::string& src) {
        // programs 95..99 are incorrect
        int idx = std::stoi(src.substr(3));
        return verdict_of(idx < 95);
    });
    CHECK(split.test.size() == 5);
    for (const auto& t : split.test) CHECK(t.sub.order_index >= 95);
}

TEST_CASE("split is disjoint and temporally ordered") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 10 + static_cast<int>(rng.index(200));
        auto subs = make_subs(n);
        uint32_t mask = rng.next_u32();
        auto split = split_dataset(subs, [&](const std::string& src) {
            int idx = std::stoi(src.substr(3));
            return verdict_of(((mask >> (idx % 31)) & 1) == 0);
        });
        std::set<std::string> ids;
        long max_early_order = -1;
        for (const auto& s : split.train) {
            CHECK(ids.insert(s.id).second);
            max_early_order = std::max(max_early_order, s.order_index);
        }
        for (const auto& s : split.validation) {
            CHECK(ids.insert(s.id).second);
            max_early_order = std::max(max_early_order, s.order_index);
        }
        for (const auto& t : split.test) {
            CHECK(ids.insert(t.sub.id).second);
            CHECK(t.sub.order_index > max_early_order);
        }
        CHECK(split.early_total == static_cast<size_t>(n * 9 / 10));
    }
}

TEST_CASE("split with no correct early programs fails") {
    auto subs = make_subs(20);
    CHECK_THROWS_AS(
        split_dataset(subs, [](const std::string&) { return verdict_of(false); }),
        EmptyTrainingSet);
}

TEST_CASE("seq_n bound: 100 programs with 1..100 lines") {
    std::vector<std::vector<TokenStatement>> bodies;
    for (int lines = 1; lines <= 100; ++lines) {
        std::vector<TokenStatement> body;
        for (int l = 0; l < lines; ++l) body.push_back(TokenStatement{{"pass"}, 0});
        bodies.push_back(body);
    }
    auto b = compute_bounds(bodies);
    CHECK(b.seq_n == 98);  // 97 programs have fewer than 98 lines
}

TEST_CASE("bounds on identical programs") {
    std::vector<std::vector<TokenStatement>> bodies(
        5, body_of("a = 1\nb = a + 2\nreturn b"));
    auto b = compute_bounds(bodies);
    CHECK(b.seq_n == 4);  // line count + 1
    CHECK(b.seq_l == 6);  // longest statement (5 tokens) + 1
    std::set<std::string> expect{"a", "=", "1", "b", "+", "2", "return"};
    CHECK(b.freq_toks == expect);
}

TEST_CASE("freq_toks keeps the smallest covering prefix") {
    // token 'a' occurs 999 times, 'b' once
    std::vector<std::vector<TokenStatement>> bodies;
    std::vector<TokenStatement> big;
    for (int i = 0; i < 333; ++i) big.push_back(TokenStatement{{"a", "a", "a"}, 0});
    bodies.push_back(big);
    bodies.push_back({TokenStatement{{"b"}, 0}});
    for (int i = 0; i < 50; ++i) bodies.push_back({});  // keep percentile bounds happy
    auto b = compute_bounds(bodies);
    CHECK(b.freq_toks == std::set<std::string>{"a"});
}

TEST_CASE("regularity filter uses strict bounds") {
    RegularityBounds b;
    b.seq_n = 3;
    b.seq_l = 4;
    b.freq_toks = {"a", "=", "1"};

    CHECK(passes_regularity(body_of("a = 1"), b));
    CHECK_FALSE(passes_regularity(body_of("a = 1\na = 1\na = 1"), b));   // == seq_n lines
    CHECK_FALSE(passes_regularity(body_of("a = a = 1"), b));             // == seq_l tokens
    CHECK_FALSE(passes_regularity(body_of("b = 1"), b));                 // token outside set
    CHECK(regularity_filter({body_of("a = 1"), body_of("b = 1")}, b).size() == 1);
}

TEST_CASE("indent tokens count toward statement length") {
    TokenStatement s{{"return", "x"}, 2};
    CHECK(statement_length(s) == 4);
}

TEST_CASE("training pairs for a two statement program") {
    auto body = body_of("a = 1\nb = 2");
    auto pairs = generate_training_pairs(body);
    REQUIRE(pairs.size() == 5);
    // three adjacent eps pairs
    CHECK(pairs[0].x.is_start());
    CHECK(pairs[0].xp == body[0]);
    CHECK(pairs[0].y.is_eps());
    CHECK(pairs[1].x == body[0]);
    CHECK(pairs[1].xp == body[1]);
    CHECK(pairs[1].y.is_eps());
    CHECK(pairs[2].x == body[1]);
    CHECK(pairs[2].xp.is_end());
    CHECK(pairs[2].y.is_eps());
    // two skip pairs regenerating the middle statement
    CHECK(pairs[3].x.is_start());
    CHECK(pairs[3].xp == body[1]);
    CHECK(pairs[3].y == body[0]);
    CHECK(pairs[4].x == body[0]);
    CHECK(pairs[4].xp.is_end());
    CHECK(pairs[4].y == body[1]);
}

TEST_CASE("empty program yields the single start/end pair") {
    auto pairs = generate_training_pairs({});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].x.is_start());
    CHECK(pairs[0].xp.is_end());
    CHECK(pairs[0].y.is_eps());
}

TEST_CASE("pair count law holds for random programs") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = rng.index(30);
        std::vector<TokenStatement> body(n, TokenStatement{{"pass"}, 0});
        CHECK(generate_training_pairs(body).size() == 2 * n + 1);
    }
}

TEST_CASE("the worked example fragment pair appears in its correct variant") {
    const std::string correct =
        "def evaluatePoly(poly, x):\n"
        "  a = 0\n"
        "  f = 0.0\n"
        "  while a < len(poly):\n"
        "    f = poly[a]*x**a+f\n"
        "    a += 1\n"
        "  return f\n";
    auto parts = split_header(tokenize(correct));
    auto [renamed, table] = rename(parts.all(), {"range", "len"});
    std::vector<TokenStatement> body(renamed.begin() + 1, renamed.end());
    auto pairs = generate_training_pairs(body);
    bool found = false;
    for (const auto& p : pairs) {
        if (detokenize(p.x) == "  x3 = 0.0" &&
            detokenize(p.xp) == "    x3 = x0 [ x2 ] * x1 ** x2 + x3" &&
            detokenize(p.y) == "  while x2 < len ( x0 ) :")
            found = true;
    }
    CHECK(found);
}

TEST_CASE("corpus files round trip") {
    auto subs = make_subs(5);
    subs[2].source = "line1\nline2\n";
    const std::string path = "/tmp/skp_test_corpus.jsonl";
    save_corpus(path, subs);
    auto loaded = load_corpus(path);
    REQUIRE(loaded.size() == subs.size());
    for (size_t i = 0; i < subs.size(); ++i) {
        CHECK(loaded[i].id == subs[i].id);
        CHECK(loaded[i].order_index == subs[i].order_index);
        CHECK(loaded[i].source == subs[i].source);
    }
}
