#include "skp/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

#include "skp/checker.hpp"
#include "skp/tokenizer.hpp"

namespace skp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct NamePools {
    std::vector<std::string> param = {"poly", "lst", "vals", "nums", "arr",
                                      "items", "seq", "data", "coeffs"};
    std::vector<std::string> point = {"x", "val", "num", "point", "base", "z"};
    std::vector<std::string> accum = {"result", "total", "s", "acc", "out", "ans", "res"};
    std::vector<std::string> index = {"i", "n", "idx", "j", "m", "count"};
    std::vector<std::string> elem = {"c", "e", "item", "term", "v", "elem"};
};

const std::vector<std::string>& templates_for(const std::string& assignment) {
    static const std::vector<std::string> evalpoly = {
        "def evalpoly($P, $X):\n"
        "  $S = 0.0\n"
        "  $I = 0\n"
        "  for $C in $P:\n"
        "    $S = $S + $C * $X ** $I\n"
        "    $I = $I + 1\n"
        "  return $S\n",

        "def evalpoly($P, $X):\n"
        "  $S = 0.0\n"
        "  for $I in range(len($P)):\n"
        "    $S = $S + $P[$I] * $X ** $I\n"
        "  return $S\n",

        "def evalpoly($P, $X):\n"
        "  $S = 0.0\n"
        "  $I = 0\n"
        "  while $I < len($P):\n"
        "    $S = $S + $P[$I] * $X ** $I\n"
        "    $I = $I + 1\n"
        "  return $S\n",

        "def evalpoly($P, $X):\n"
        "  $S = 0.0\n"
        "  for $I in range(len($P)):\n"
        "    $S += $P[$I] * $X ** $I\n"
        "  return $S\n",

        "def evalpoly($P, $X):\n"
        "  $S = 0.0\n"
        "  $I = 0\n"
        "  while $I < len($P):\n"
        "    $S += $P[$I] * $X ** $I\n"
        "    $I += 1\n"
        "  return $S\n",

        "def evalpoly($P, $X):\n"
        "  $S = 0.0\n"
        "  $I = 0\n"
        "  for $C in $P:\n"
        "    $S += $C * $X ** $I\n"
        "    $I += 1\n"
        "  return $S\n",
    };
    static const std::vector<std::string> every_other = {
        "def everyOther($P):\n"
        "  $R = []\n"
        "  $I = 0\n"
        "  while $I < len($P):\n"
        "    $R.append($P[$I])\n"
        "    $I = $I + 2\n"
        "  return $R\n",

        "def everyOther($P):\n"
        "  $R = []\n"
        "  for $I in range(0, len($P), 2):\n"
        "    $R.append($P[$I])\n"
        "  return $R\n",

        "def everyOther($P):\n"
        "  return $P[::2]\n",

        "def everyOther($P):\n"
        "  $R = []\n"
        "  $I = 0\n"
        "  for $C in $P:\n"
        "    if $I % 2 == 0:\n"
        "      $R.append($C)\n"
        "    $I = $I + 1\n"
        "  return $R\n",

        "def everyOther($P):\n"
        "  $R = []\n"
        "  $I = 0\n"
        "  while $I < len($P):\n"
        "    $R = $R + [$P[$I]]\n"
        "    $I = $I + 2\n"
        "  return $R\n",
    };
    static const std::vector<std::string> deriv = {
        "def deriv($P):\n"
        "  if len($P) == 1:\n"
        "    return [0.0]\n"
        "  $R = []\n"
        "  for $I in range(1, len($P)):\n"
        "    $R.append($P[$I] * $I)\n"
        "  return $R\n",

        "def deriv($P):\n"
        "  $R = []\n"
        "  $I = 1\n"
        "  while $I < len($P):\n"
        "    $R.append($P[$I] * $I)\n"
        "    $I = $I + 1\n"
        "  if len($R) == 0:\n"
        "    return [0.0]\n"
        "  return $R\n",

        "def deriv($P):\n"
        "  if len($P) == 1:\n"
        "    return [0.0]\n"
        "  $R = []\n"
        "  for $I in range(1, len($P)):\n"
        "    $R = $R + [$P[$I] * $I]\n"
        "  return $R\n",
    };
    if (assignment == "evalpoly") return evalpoly;
    if (assignment == "everyOther") return every_other;
    if (assignment == "deriv") return deriv;
    throw std::runtime_error("unknown synth assignment: " + assignment);
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace

std::vector<std::string> synth_assignment_names() { return {"evalpoly", "everyOther", "deriv"}; }

json synth_suite(const std::string& assignment) {
    if (assignment == "evalpoly") {
        return json{{"function", "evalpoly"},
                    {"timeout_ms", 200},
                    {"tests",
                     json::array({json{{"args", json::array({json::array(), 2.0})}, {"expected", 0.0}},
                                  json{{"args", json::array({json::array({3.0}), 5.0})}, {"expected", 3.0}},
                                  json{{"args", json::array({json::array({1.0, 2.0, 3.0}), 2.0})},
                                       {"expected", 17.0}},
                                  json{{"args", json::array({json::array({0.0, 5.5, 0.0, 2.5}), 2.0})},
                                       {"expected", 31.0}},
                                  json{{"args", json::array({json::array({2.0, -1.0}), 3.0})},
                                       {"expected", -1.0}}})}};
    }
    if (assignment == "everyOther") {
        return json{
            {"function", "everyOther"},
            {"timeout_ms", 200},
            {"tests",
             json::array(
                 {json{{"args", json::array({json::array()})}, {"expected", json::array()}},
                  json{{"args", json::array({json::array({7})})}, {"expected", json::array({7})}},
                  json{{"args", json::array({json::array({1, 2, 3, 4})})},
                       {"expected", json::array({1, 3})}},
                  json{{"args", json::array({json::array({5, 4, 3, 2, 1})})},
                       {"expected", json::array({5, 3, 1})}},
                  json{{"args", json::array({json::array({"a", "b", "c"})})},
                       {"expected", json::array({"a", "c"})}}})}};
    }
    if (assignment == "deriv") {
        return json{
            {"function", "deriv"},
            {"timeout_ms", 200},
            {"tests",
             json::array(
                 {json{{"args", json::array({json::array({6.0})})}, {"expected", json::array({0.0})}},
                  json{{"args", json::array({json::array({1.0, 2.0, 3.0})})},
                       {"expected", json::array({2.0, 6.0})}},
                  json{{"args", json::array({json::array({0.0, 0.0, 4.0, 0.5})})},
                       {"expected", json::array({0.0, 8.0, 1.5})}},
                  json{{"args", json::array({json::array({2.0, -3.0})})},
                       {"expected", json::array({-3.0})}}})}};
    }
    throw std::runtime_error("unknown synth assignment: " + assignment);
}

std::string synth_correct_variant(const std::string& assignment, Rng& rng) {
    static const NamePools pools;
    const auto& templates = templates_for(assignment);
    std::string src = templates[rng.index(templates.size())];
    replace_all(src, "$P", pools.param[rng.index(pools.param.size())]);
    replace_all(src, "$X", pools.point[rng.index(pools.point.size())]);
    replace_all(src, "$S", pools.accum[rng.index(pools.accum.size())]);
    replace_all(src, "$I", pools.index[rng.index(pools.index.size())]);
    replace_all(src, "$C", pools.elem[rng.index(pools.elem.size())]);
    replace_all(src, "$R", pools.accum[rng.index(pools.accum.size())]);
    return src;
}

namespace {

struct Mutation {
    std::string kind;
    size_t stmt;
    size_t tok = 0;
    std::string replacement;
};

std::vector<Mutation> collect_mutations(const std::vector<TokenStatement>& body) {
    std::vector<Mutation> muts;
    std::set<std::string> seen_names;
    std::vector<std::set<std::string>> names_before(body.size());
    for (size_t s = 0; s < body.size(); ++s) {
        names_before[s] = seen_names;
        for (const auto& t : body[s].tokens)
            if (is_name_token(t)) seen_names.insert(t);
    }

    for (size_t s = 0; s < body.size(); ++s) {
        const auto& toks = body[s].tokens;
        for (size_t t = 0; t < toks.size(); ++t) {
            if (toks[t] == "+=") muts.push_back({"swap", s, t, "="});
            if (toks[t] == "<") muts.push_back({"swap", s, t, "<="});
            if (toks[t] == "==") muts.push_back({"swap", s, t, "!="});
            if (toks[t] == "+") muts.push_back({"swap", s, t, "-"});
            if (toks[t] == "*") muts.push_back({"swap", s, t, "+"});
        }
        // off-by-one on a loop/branch header that calls len(...)
        if (!toks.empty() && (toks[0] == "for" || toks[0] == "while" || toks[0] == "if")) {
            for (size_t t = 0; t + 1 < toks.size(); ++t) {
                if (toks[t] != "len" || toks[t + 1] != "(") continue;
                int depth = 0;
                for (size_t u = t + 1; u < toks.size(); ++u) {
                    if (toks[u] == "(") ++depth;
                    if (toks[u] == ")" && --depth == 0) {
                        muts.push_back({"off_by_one", s, u, ""});
                        break;
                    }
                }
            }
        }
        // deletable update statements: every name they use occurred earlier
        if (toks.size() >= 2 &&
            (toks[1] == "+=" || (toks.size() >= 4 && toks[1] == "=" && toks[2] == toks[0]))) {
            bool all_seen = true;
            for (const auto& t : toks)
                if (is_name_token(t) && !names_before[s].count(t)) all_seen = false;
            if (all_seen) muts.push_back({"delete", s, 0, ""});
        }
        // indent the trailing return into the preceding block
        if (!toks.empty() && toks[0] == "return" && s > 0 &&
            body[s - 1].indent_depth > body[s].indent_depth)
            muts.push_back({"indent", s, 0, ""});
        if (!toks.empty() &&
            (toks[0] == "for" || toks[0] == "while" || toks[0] == "if" || toks[0] == "else") &&
            toks.back() == ":")
            muts.push_back({"drop_colon", s, toks.size() - 1, ""});
        for (size_t t = toks.size(); t-- > 0;) {
            if (toks[t] == ")") {
                muts.push_back({"drop_paren", s, t, ""});
                break;
            }
        }
    }
    return muts;
}

std::string apply_mutation(const ProgramStatements& parts, const Mutation& m) {
    std::vector<TokenStatement> body = parts.body;
    auto& stmt = body[m.stmt];
    if (m.kind == "swap") {
        stmt.tokens[m.tok] = m.replacement;
    } else if (m.kind == "off_by_one") {
        stmt.tokens.insert(stmt.tokens.begin() + static_cast<long>(m.tok) + 1, {"-", "1"});
    } else if (m.kind == "delete") {
        body.erase(body.begin() + static_cast<long>(m.stmt));
    } else if (m.kind == "indent") {
        stmt.indent_depth += 1;
    } else if (m.kind == "drop_colon") {
        stmt.tokens.pop_back();
    } else if (m.kind == "drop_paren") {
        stmt.tokens.erase(stmt.tokens.begin() + static_cast<long>(m.tok));
    }
    std::vector<TokenStatement> full = parts.header;
    full.insert(full.end(), body.begin(), body.end());
    return detokenize_program(full);
}

}  // namespace

std::string synth_mutate(const std::string& source, Rng& rng) {
    auto parts = split_header(tokenize(source));
    auto muts = collect_mutations(parts.body);
    if (muts.empty()) return "";
    std::vector<size_t> order(muts.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    // The caller verifies failure; we only guarantee the text changed.
    const std::string canonical = detokenize_program(parts.all());
    for (size_t i : order) {
        std::string mutated = apply_mutation(parts, muts[i]);
        if (mutated != canonical) return mutated;
    }
    return "";
}

SynthResult generate_synth_corpus(const std::string& out_dir, const SynthConfig& cfg) {
    fs::create_directories(out_dir);
    SynthResult result;

    for (const auto& assignment : cfg.assignments) {
        Rng rng(cfg.seed ^ std::hash<std::string>{}(assignment));
        const json suite_json = synth_suite(assignment);
        const fs::path dir = fs::path(out_dir) / assignment;
        fs::create_directories(dir);

        std::unique_ptr<Checker> checker;
        if (cfg.verify)
            checker = std::make_unique<Checker>(cfg.interpreter, TestSuite::from_json(suite_json));

        auto is_correct = [&](const std::string& src) {
            return !checker || checker->check(src).pass;
        };
        auto is_incorrect = [&](const std::string& src) {
            return !checker || !checker->check(src).pass;
        };

        const size_t n_early = static_cast<size_t>(9 * cfg.n_test);
        if (static_cast<size_t>(cfg.n_correct) > n_early)
            throw std::runtime_error("synth: n_correct must be <= 9 * n_test");
        const size_t n_early_incorrect = n_early - static_cast<size_t>(cfg.n_correct);

        std::vector<std::string> correct_pool;
        while (correct_pool.size() < static_cast<size_t>(cfg.n_correct)) {
            std::string src = synth_correct_variant(assignment, rng);
            if (!is_correct(src))
                throw std::runtime_error("synth: template variant failed its own suite: " + assignment);
            correct_pool.push_back(std::move(src));
        }

        auto make_mutant = [&]() {
            for (int attempt = 0; attempt < 64; ++attempt) {
                const std::string& base = correct_pool[rng.index(correct_pool.size())];
                std::string mutant = synth_mutate(base, rng);
                if (!mutant.empty() && is_incorrect(mutant)) return mutant;
            }
            throw std::runtime_error("synth: could not derive a failing mutant for " + assignment);
        };

        // Early block: correct variants and some incorrect ones, shuffled.
        std::vector<std::string> early = correct_pool;
        for (size_t i = 0; i < n_early_incorrect; ++i) early.push_back(make_mutant());
        rng.shuffle(early);

        std::vector<Submission> subs;
        long order = 0;
        for (const auto& src : early) {
            subs.push_back({assignment + "-" + std::to_string(order), order, src, assignment});
            ++order;
        }
        for (int i = 0; i < cfg.n_test; ++i) {
            subs.push_back({assignment + "-" + std::to_string(order), order, make_mutant(), assignment});
            ++order;
        }

        const std::string corpus_path = (dir / "corpus.jsonl").string();
        const std::string suite_path = (dir / "suite.json").string();
        const std::string config_path = (dir / "config.json").string();
        save_corpus(corpus_path, subs);
        {
            std::ofstream out(suite_path);
            out << suite_json.dump(2) << '\n';
        }
        {
            json config{{"name", assignment}, {"corpus", "corpus.jsonl"},
                        {"suite", "suite.json"}, {"backend", "exhaustive-exact"},
                        {"k", 10},              {"budget", 5000},
                        {"seed", cfg.seed},     {"interpreter", cfg.interpreter}};
            std::ofstream out(config_path);
            out << config.dump(2) << '\n';
        }
        result.assignments.push_back({assignment, corpus_path, suite_path, config_path,
                                      correct_pool.size(), n_early_incorrect,
                                      static_cast<size_t>(cfg.n_test)});
    }
    return result;
}

}  // namespace skp
