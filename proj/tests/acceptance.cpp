// Acceptance suite: every criterion prints one [PASS]/[FAIL] line; the
// binary exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "skp/pipeline.hpp"
#include "skp/synth.hpp"
#include "skp/trainer.hpp"

using namespace skp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
double g_bench_elapsed_sec = 0.0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double sec() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
           detail.c_str());
    fflush(stdout);
    if (!ok) ++g_failures;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- criterion 1

void criterion_gradients() {
    Timer timer;
    Rng rng(101);
    const std::vector<std::string> extras{"p", "q", "r", "s", "t"};
    int instances = 0;
    bool all_ok = true;
    std::string detail;
    for (int trial = 0; trial < 20; ++trial) {
        std::set<std::string> toks(extras.begin(),
                                   extras.begin() + 1 + static_cast<long>(rng.index(5)));
        Vocabulary vocab = Vocabulary::build(toks);  // 8..12 tokens
        const int hidden = 3 + static_cast<int>(rng.index(6));  // 3..8
        Seq2SeqParams params = Seq2SeqParams::init(vocab.size(), hidden, 0.3, rng);
        auto seq = [&](size_t lo, size_t hi) {
            std::vector<int> ids;
            const size_t len = lo + rng.index(hi - lo + 1);
            for (size_t i = 0; i < len; ++i)
                ids.push_back(static_cast<int>(rng.index(static_cast<size_t>(vocab.size()))));
            return ids;
        };
        PairExample ex;
        ex.before = seq(1, 5);
        ex.after = seq(1, 5);
        ex.target = seq(0, 4);  // plus EOS keeps statements at <= 5 tokens
        testing::FdMismatch bad;
        if (!testing::gradients_match_fd(params, vocab, ex, 1e-4, 1e-5, &bad)) {
            all_ok = false;
            detail = "mismatch in " + bad.tensor + "[" + std::to_string(bad.index) + "]";
            break;
        }
        ++instances;
    }
    const double sec = timer.sec();
    if (all_ok && sec >= 60.0) {
        all_ok = false;
        detail = "too slow";
    }
    if (all_ok)
        detail = std::to_string(instances) + " instances, rel tol 1e-4, " +
                 std::to_string(sec) + " s";
    report(1, "gradient oracle", all_ok, detail);
}

// ---------------------------------------------------------------- criterion 2

void criterion_beam() {
    Rng rng(202);
    bool all_ok = true;
    std::string detail;
    int trials = 0;
    for (int trial = 0; trial < 50 && all_ok; ++trial) {
        // emittable alphabet of 4 (reserved only) or 5 tokens
        std::set<std::string> toks;
        if (rng.index(2) == 1) toks.insert("w");
        Vocabulary vocab = Vocabulary::build(toks);
        const int hidden = 3 + static_cast<int>(rng.index(4));
        Seq2SeqParams params = Seq2SeqParams::init(vocab.size(), hidden, 0.5, rng);
        const int l_max = 1 + static_cast<int>(rng.index(4));

        std::vector<int> frag_ids{static_cast<int>(rng.index(static_cast<size_t>(vocab.size())))};
        Eigen::VectorXd h1 = encode_sequence(params.enc_before, frag_ids);
        Eigen::VectorXd h2 = encode_sequence(params.enc_after, frag_ids);
        Eigen::VectorXd vc = context_vector(params, h1, h2);

        auto oracle = testing::brute_force_sequences(params, vocab, vc, l_max);
        auto beam = decode_beam(params, vocab, vc, static_cast<int>(oracle.size()), l_max);
        if (beam.size() != oracle.size()) {
            all_ok = false;
            detail = "candidate count mismatch";
            break;
        }
        for (size_t i = 0; i < beam.size(); ++i) {
            if (beam[i].tokens != oracle[i].tokens ||
                std::abs(std::exp(beam[i].logprob) - std::exp(oracle[i].logprob)) > 1e-9) {
                all_ok = false;
                detail = "sequence " + std::to_string(i) + " differs";
                break;
            }
        }
        ++trials;
    }
    if (all_ok) detail = std::to_string(trials) + " randomized trials, tol 1e-9";
    report(2, "beam-search oracle", all_ok, detail);
}

// ---------------------------------------------------------------- criterion 3

void criterion_exhaustive() {
    Rng rng(303);
    bool all_ok = true;
    std::string detail;

    const std::vector<std::string> words{"a", "bb", "c", "dd", "e", "fff", "g"};
    auto random_stmt = [&]() {
        if (rng.index(8) == 0) return TokenStatement::eps();
        TokenStatement s;
        const size_t len = 1 + rng.index(3);
        for (size_t i = 0; i < len; ++i) s.tokens.push_back(words[rng.index(words.size())]);
        s.indent_depth = static_cast<int>(rng.index(3));
        return s;
    };

    // exact mode: count ratios reproduced on every key
    for (int corpus = 0; corpus < 20 && all_ok; ++corpus) {
        std::vector<TrainingPair> pairs;
        const size_t n = 5 + rng.index(60);
        for (size_t i = 0; i < n; ++i) pairs.push_back({random_stmt(), random_stmt(), random_stmt()});
        ExhaustiveModel m;
        m.train(pairs);

        // independent recount
        std::map<std::string, std::map<std::string, long>> counts;
        std::map<std::string, long> totals;
        for (const auto& p : pairs) {
            const std::string key = model_text(p.x) + "\n" + model_text(p.xp);
            ++counts[key][model_text(p.y)];
            ++totals[key];
        }
        for (const auto& p : pairs) {
            auto preds = m.predict_exact({p.x, p.xp}, 1000);
            const std::string key = model_text(p.x) + "\n" + model_text(p.xp);
            if (preds.size() != counts[key].size()) {
                all_ok = false;
                detail = "candidate set size mismatch";
                break;
            }
            double sum = 0.0;
            for (const auto& c : preds.candidates) {
                const double expect = static_cast<double>(counts[key][model_text(c.stmt)]) /
                                      static_cast<double>(totals[key]);
                if (c.prob != expect) {
                    all_ok = false;
                    detail = "count ratio differs on key";
                    break;
                }
                sum += c.prob;
            }
            if (all_ok && std::abs(sum - 1.0) > 1e-12) {
                all_ok = false;
                detail = "per-key distribution does not sum to 1";
            }
            if (!all_ok) break;
        }
    }

    // approximate mode: agrees with a brute-force nearest-key scan
    if (all_ok) {
        std::vector<TrainingPair> pairs;
        for (int i = 0; i < 80; ++i) pairs.push_back({random_stmt(), random_stmt(), random_stmt()});
        ExhaustiveModel m;
        m.train(pairs);
        for (int q = 0; q < 100 && all_ok; ++q) {
            PartialFragment frag{random_stmt(), random_stmt()};
            const std::string query = ExhaustiveModel::key_of(frag);
            long best = 1L << 40;
            std::string best_key;
            for (const auto& [key, entry] : m.table()) {
                long d = levenshtein(query, key);
                if (d < best) {
                    best = d;
                    best_key = key;
                }
            }
            auto got = m.predict_approximate(frag, 1000);
            const auto& expect = m.table().at(best_key);
            if (got.size() != expect.candidates.size()) {
                all_ok = false;
                detail = "approximate candidate set mismatch";
                break;
            }
            for (size_t i = 0; i < got.size(); ++i) {
                if (!(got.candidates[i].stmt == expect.candidates[i].first) ||
                    got.candidates[i].prob !=
                        static_cast<double>(expect.candidates[i].second) /
                            static_cast<double>(expect.total)) {
                    all_ok = false;
                    detail = "approximate distribution mismatch";
                    break;
                }
            }
        }
    }
    if (all_ok) detail = "20 random corpora exact, 100 approximate queries";
    report(3, "exhaustive-model oracle", all_ok, detail);
}

// ---------------------------------------------------------------- criterion 4

void criterion_search() {
    Rng rng(404);
    bool all_ok = true;
    std::string detail;
    int trials = 0;
    for (int trial = 0; trial < 100 && all_ok; ++trial) {
        CandidateSpace space;
        const int sites = 1 + static_cast<int>(rng.index(4));
        for (int j = 0; j < sites; ++j) {
            SiteCandidates site;
            site.position = j;
            const int cands = 1 + static_cast<int>(rng.index(4));
            double prob = 1.0;
            for (int r = 0; r < cands; ++r) {
                site.entries.push_back(
                    {TokenStatement{{"s" + std::to_string(j) + "_" + std::to_string(r)}, 0}, prob});
                prob *= 0.2 + 0.7 * rng.next_double();
            }
            space.sites.push_back(std::move(site));
        }
        const uint32_t mask = rng.next_u32();
        auto accept = [&](const std::vector<int>& sel) {
            uint32_t hash = 2166136261u;
            for (int r : sel) hash = (hash ^ static_cast<uint32_t>(r)) * 16777619u;
            return ((mask >> (hash % 30)) & 1u) != 0;
        };
        bool any = false;
        const double best = testing::brute_force_min_cost(space, accept, &any);

        double last = -1.0;
        bool monotone = true;
        SearchConfig cfg;
        cfg.budget = static_cast<long>(space.full_space_size()) + 1;
        auto res = program_search(space, accept, cfg,
                                  [&](long, double cost, const std::vector<int>&, bool) {
                                      if (cost < last - 1e-9) monotone = false;
                                      last = cost;
                                  });
        if (!monotone) {
            all_ok = false;
            detail = "popped costs decreased";
            break;
        }
        if (res.success != any ||
            (any && std::abs(res.cost - best) > 1e-9 * std::max(1.0, best))) {
            all_ok = false;
            detail = "differs from brute-force optimum";
            break;
        }
        ++trials;
    }
    if (all_ok) detail = std::to_string(trials) + " randomized toy spaces";
    report(4, "search optimality", all_ok, detail);
}

// ---------------------------------------------------------------- criterion 5

void criterion_laws() {
    Rng rng(505);
    bool all_ok = true;
    std::string detail;

    for (int trial = 0; trial < 1000 && all_ok; ++trial) {
        const size_t n = rng.index(40);
        std::vector<TokenStatement> body(n, TokenStatement{{"pass"}, 0});
        if (generate_training_pairs(body).size() != 2 * n + 1) {
            all_ok = false;
            detail = "pair-count law violated";
        }
    }

    for (int trial = 0; trial < 1000 && all_ok; ++trial) {
        const int n = 1 + static_cast<int>(rng.index(120));
        std::vector<Submission> subs;
        for (int i = 0; i < n; ++i)
            subs.push_back({"s" + std::to_string(i), i, std::to_string(i), "a"});
        const uint32_t mask = rng.next_u32();
        try {
            auto split = split_dataset(subs, [&](const std::string& src) {
                int idx = std::stoi(src);
                return ((mask >> (idx % 32)) & 1u) ? Verdict::ok()
                                                   : Verdict::fail(FailureKind::semantic);
            });
            std::set<std::string> ids;
            long max_early = -1;
            for (const auto& s : split.train) {
                if (!ids.insert(s.id).second) all_ok = false;
                max_early = std::max(max_early, s.order_index);
            }
            for (const auto& s : split.validation) {
                if (!ids.insert(s.id).second) all_ok = false;
                max_early = std::max(max_early, s.order_index);
            }
            for (const auto& t : split.test) {
                if (!ids.insert(t.sub.id).second) all_ok = false;
                if (t.sub.order_index <= max_early) all_ok = false;
            }
            if (split.early_total != static_cast<size_t>(static_cast<double>(n) * 0.9))
                all_ok = false;
            if (!all_ok) detail = "split law violated";
        } catch (const EmptyTrainingSet&) {
            // legal outcome when the early part has no correct programs
        }
    }
    if (all_ok) detail = "1000 pair-count cases, 1000 split cases";
    report(5, "pair-count and split laws", all_ok, detail);
}

// ------------------------------------------------------------- criteria 6-9

struct BenchModels {
    AssignmentConfig cfg;
    TrainedModel exhaustive_model;
    TrainedModel neural_model;
    json exhaustive_report, neural_report;
};

void criterion_roundtrip_and_benchmark(const std::string& bench_dir) {
    Timer bench_timer;

    SynthConfig synth_cfg;
    synth_cfg.assignments = {"evalpoly", "everyOther"};
    synth_cfg.n_correct = 240;
    synth_cfg.n_test = 55;
    synth_cfg.seed = 20260811;
    auto synth = generate_synth_corpus(bench_dir, synth_cfg);

    // --- criterion 6: tokenizer round trip + forbidden-list soundness
    bool rt_ok = true;
    std::string rt_detail;
    long rt_programs = 0;
    double min_retention = 1.0;
    std::vector<BenchModels> models;

    for (const auto& a : synth.assignments) {
        auto cfg = AssignmentConfig::load(a.config_path);
        Checker checker(cfg.interpreter, TestSuite::load(cfg.suite_path));

        auto subs = load_corpus(cfg.corpus_path);
        for (const auto& s : subs) {
            const bool orig = checker.check(s.source).pass;
            auto [renamed, table] = rename(tokenize(s.source), {"len", "range", "append"});
            const std::string round = restore(renamed, table);
            const bool after = checker.check(round).pass;
            if (orig != after) {
                rt_ok = false;
                rt_detail = "verdict changed for " + s.id;
            }
            ++rt_programs;
        }

        BenchModels bm;
        bm.cfg = cfg;
        bm.cfg.backend = Backend::exhaustive_exact;
        auto trained = run_train(bm.cfg, checker);
        const double retention = trained.report["forbidden_retention"].get<double>();
        min_retention = std::min(min_retention, retention);
        bm.exhaustive_model = std::move(trained.model);
        bm.exhaustive_report = std::move(trained.report);
        models.push_back(std::move(bm));
    }
    if (rt_ok && min_retention < 0.98) {
        rt_ok = false;
        rt_detail = "forbidden retention " + std::to_string(min_retention);
    }
    if (rt_ok)
        rt_detail = std::to_string(rt_programs) + " programs round-tripped, min retention " +
                    std::to_string(min_retention);
    report(6, "tokenizer round trip", rt_ok, rt_detail);

    // --- criterion 7: end-to-end benchmark
    long ex_fixed = 0, ex_total = 0, nn_fixed = 0, nn_total = 0;
    for (auto& bm : models) {
        Checker checker(bm.cfg.interpreter, TestSuite::load(bm.cfg.suite_path));
        bm.cfg.backend = Backend::exhaustive_exact;
        bm.cfg.budget = 5000;
        auto eval = run_evaluate(bm.cfg, bm.exhaustive_model, checker);
        ex_fixed += eval.report["metrics"]["n_fixed"].get<long>();
        ex_total += eval.report["metrics"]["n_test"].get<long>();
    }
    for (auto& bm : models) {
        Checker checker(bm.cfg.interpreter, TestSuite::load(bm.cfg.suite_path));
        AssignmentConfig ncfg = bm.cfg;
        ncfg.backend = Backend::neural;
        ncfg.neural.hidden = 40;
        ncfg.neural.epochs = 30;
        ncfg.neural.batch_size = 50;
        ncfg.neural.learning_rate = 1e-3;
        ncfg.budget = 1500;
        auto trained = run_train(ncfg, checker);
        bm.neural_model = std::move(trained.model);
        bm.neural_report = std::move(trained.report);
        auto eval = run_evaluate(ncfg, bm.neural_model, checker);
        nn_fixed += eval.report["metrics"]["n_fixed"].get<long>();
        nn_total += eval.report["metrics"]["n_test"].get<long>();
    }
    const double ex_acc = static_cast<double>(ex_fixed) / static_cast<double>(ex_total);
    const double nn_acc = static_cast<double>(nn_fixed) / static_cast<double>(nn_total);
    g_bench_elapsed_sec = bench_timer.sec();
    const bool bench_ok = ex_total >= 100 && nn_total >= 100 && ex_acc >= 0.80 &&
                          nn_acc >= 0.50 && g_bench_elapsed_sec <= 900.0;
    char buf[256];
    snprintf(buf, sizeof(buf),
             "exhaustive %ld/%ld (%.3f, need >=0.80), neural %ld/%ld (%.3f, need >=0.50), %.0f s",
             ex_fixed, ex_total, ex_acc, nn_fixed, nn_total, nn_acc, g_bench_elapsed_sec);
    report(7, "end-to-end synthetic benchmark", bench_ok, buf);
}

// ---------------------------------------------------------------- criterion 8

void criterion_determinism(const std::string& dir) {
    SynthConfig synth_cfg;
    synth_cfg.assignments = {"deriv"};
    synth_cfg.n_correct = 45;
    synth_cfg.n_test = 6;
    synth_cfg.seed = 77;
    auto synth = generate_synth_corpus(dir, synth_cfg);
    auto base = AssignmentConfig::load(synth.assignments[0].config_path);
    base.neural.hidden = 12;
    base.neural.epochs = 6;
    base.budget = 400;

    bool ok = true;
    std::string detail;
    for (Backend backend : {Backend::exhaustive_exact, Backend::neural}) {
        AssignmentConfig cfg = base;
        cfg.backend = backend;
        json metrics[2];
        std::string bytes[2];
        for (int run = 0; run < 2; ++run) {
            Checker checker(cfg.interpreter, TestSuite::load(cfg.suite_path));
            auto trained = run_train(cfg, checker);
            const std::string path =
                (fs::path(dir) / ("det_" + backend_name(backend) + std::to_string(run) + ".json"))
                    .string();
            trained.model.save(path);
            bytes[run] = slurp(path);
            auto eval = run_evaluate(cfg, trained.model, checker);
            metrics[run] = eval.report["metrics"];
        }
        if (bytes[0] != bytes[1]) {
            ok = false;
            detail = backend_name(backend) + " model files differ";
        }
        if (metrics[0] != metrics[1]) {
            ok = false;
            detail = backend_name(backend) + " metric reports differ";
        }
    }
    if (ok) detail = "exhaustive + neural: byte-identical models, identical metrics";
    report(8, "determinism", ok, detail);
}

// ---------------------------------------------------------------- criterion 9

void criterion_worked_example() {  // the off-by-one polynomial evaluator

    const std::string correct =
        "def evaluatePoly(poly, x):\n"
        "  a = 0\n"
        "  f = 0.0\n"
        "  while a < len(poly):\n"
        "    f = poly[a]*x**a+f\n"
        "    a += 1\n"
        "  return f\n";
    const std::string incorrect =
        "def evaluatePoly(poly, x):\n"
        "  a = 0\n"
        "  f = 0.0\n"
        "  for a in range(0,len(poly) - 1):\n"
        "    f = poly[a]*x**a+f\n"
        "    a += 1\n"
        "  return f\n";

    std::set<std::string> forbidden{"range", "len"};
    TrainedModel model;
    model.backend_kind = "exhaustive";
    model.forbidden = forbidden;
    model.bounds.seq_n = 100;
    model.bounds.seq_l = 100;
    auto parts = split_header(tokenize(correct));
    auto [renamed, table] = rename(parts.all(), forbidden);
    std::vector<TokenStatement> body(renamed.begin() + 1, renamed.end());
    ExhaustiveModel ex;
    ex.train(generate_training_pairs(body));
    model.exhaustive = std::move(ex);

    AssignmentConfig cfg;
    cfg.name = "evaluatePoly";
    cfg.backend = Backend::exhaustive_exact;
    cfg.k = 5;
    cfg.budget = 100;

    TestSuite suite;
    suite.function = "evaluatePoly";
    suite.tests = json::array({
        json{{"args", json::array({json::array(), 2.0})}, {"expected", 0.0}},
        json{{"args", json::array({json::array({1.0, 2.0, 3.0}), 2.0})}, {"expected", 17.0}},
        json{{"args", json::array({json::array({2.0, -1.0, 0.5, 4.0}), 2.0})}, {"expected", 34.0}},
    });
    Checker checker("python3", suite);

    bool ok = !checker.check(incorrect).pass;
    std::string detail = "original must fail";
    if (ok) {
        auto fix = run_correct(cfg, model, checker, incorrect);
        ok = fix.fixed && checker.check(fix.corrected_source).pass &&
             fix.corrected_source.find("while a < len ( poly ) :") != std::string::npos;
        detail = ok ? ("fixed at enumeration index " + std::to_string(fix.enumeration_index) +
                       " with the while-loop replacement")
                    : "no suite-passing while-loop fix";
    }
    report(9, "worked repair example", ok, detail);
}

}  // namespace

int main() {
    const std::string work = (fs::temp_directory_path() / "skp_acceptance").string();
    fs::remove_all(work);
    fs::create_directories(work);

    Timer total;
    criterion_gradients();
    criterion_beam();
    criterion_exhaustive();
    criterion_search();
    criterion_laws();
    criterion_roundtrip_and_benchmark(work + "/bench");
    criterion_determinism(work + "/determinism");
    criterion_worked_example();

    printf("%d/9 criteria passed in %.0f s\n", 9 - g_failures, total.sec());
    return g_failures == 0 ? 0 : 1;
}
