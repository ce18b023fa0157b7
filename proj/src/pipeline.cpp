#include "skp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace skp {

using nlohmann::json;
namespace fs = std::filesystem;

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::exhaustive_exact: return "exhaustive-exact";
        case Backend::exhaustive_approx: return "exhaustive-approx";
        case Backend::neural: return "neural";
    }
    return "?";
}

Backend backend_from_name(const std::string& name) {
    if (name == "exhaustive-exact") return Backend::exhaustive_exact;
    if (name == "exhaustive-approx") return Backend::exhaustive_approx;
    if (name == "neural") return Backend::neural;
    throw ConfigError("unknown backend: " + name +
                      " (expected exhaustive-exact, exhaustive-approx or neural)");
}

AssignmentConfig AssignmentConfig::from_json(const json& j, const std::string& base_dir) {
    AssignmentConfig c;
    c.name = j.at("name").get<std::string>();
    auto resolve = [&](const std::string& p) {
        if (base_dir.empty() || p.empty() || fs::path(p).is_absolute()) return p;
        return (fs::path(base_dir) / p).string();
    };
    c.corpus_path = resolve(j.at("corpus").get<std::string>());
    c.suite_path = resolve(j.at("suite").get<std::string>());
    if (j.contains("backend")) c.backend = backend_from_name(j["backend"].get<std::string>());
    if (j.contains("interpreter")) c.interpreter = j["interpreter"].get<std::string>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("budget")) c.budget = j["budget"].get<long>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("dedupe")) c.dedupe = j["dedupe"].get<bool>();
    if (j.contains("split")) {
        const auto& s = j["split"];
        if (s.contains("early_fraction")) c.split.early_fraction = s["early_fraction"].get<double>();
        if (s.contains("train_fraction")) c.split.train_fraction = s["train_fraction"].get<double>();
    }
    if (j.contains("bounds")) {
        const auto& b = j["bounds"];
        if (b.contains("line_percentile")) c.bounds.line_percentile = b["line_percentile"].get<double>();
        if (b.contains("length_percentile"))
            c.bounds.length_percentile = b["length_percentile"].get<double>();
        if (b.contains("token_coverage")) c.bounds.token_coverage = b["token_coverage"].get<double>();
    }
    if (j.contains("forbidden_keep_fraction"))
        c.forbidden.keep_fraction = j["forbidden_keep_fraction"].get<double>();
    if (j.contains("neural")) {
        const auto& n = j["neural"];
        if (n.contains("hidden")) c.neural.hidden = n["hidden"].get<int>();
        if (n.contains("epochs")) c.neural.epochs = n["epochs"].get<int>();
        if (n.contains("batch_size")) c.neural.batch_size = n["batch_size"].get<int>();
        if (n.contains("learning_rate")) c.neural.learning_rate = n["learning_rate"].get<double>();
        if (n.contains("rms_decay")) c.neural.rms_decay = n["rms_decay"].get<double>();
        if (n.contains("rms_epsilon")) c.neural.rms_epsilon = n["rms_epsilon"].get<double>();
        if (n.contains("init_range")) c.neural.init_range = n["init_range"].get<double>();
    }
    if (c.k < 1) throw ConfigError("k must be >= 1");
    if (c.budget < 1) throw ConfigError("budget must be >= 1");
    return c;
}

AssignmentConfig AssignmentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j, fs::path(path).parent_path().string());
}

json AssignmentConfig::to_json() const {
    return json{{"name", name},
                {"corpus", corpus_path},
                {"suite", suite_path},
                {"backend", backend_name(backend)},
                {"interpreter", interpreter},
                {"k", k},
                {"budget", budget},
                {"seed", seed},
                {"dedupe", dedupe},
                {"split",
                 {{"early_fraction", split.early_fraction}, {"train_fraction", split.train_fraction}}},
                {"bounds",
                 {{"line_percentile", bounds.line_percentile},
                  {"length_percentile", bounds.length_percentile},
                  {"token_coverage", bounds.token_coverage}}},
                {"forbidden_keep_fraction", forbidden.keep_fraction},
                {"neural",
                 {{"hidden", neural.hidden},
                  {"epochs", neural.epochs},
                  {"batch_size", neural.batch_size},
                  {"learning_rate", neural.learning_rate},
                  {"rms_decay", neural.rms_decay},
                  {"rms_epsilon", neural.rms_epsilon},
                  {"init_range", neural.init_range}}}};
}

std::unique_ptr<PredictionModel> TrainedModel::predictor(Backend b) const {
    if (b == Backend::neural) {
        if (!neural) throw ConfigError("model file has no neural backend");
        return std::make_unique<NeuralModel>(*neural, vocab, bounds.seq_l);
    }
    if (!exhaustive) throw ConfigError("model file has no exhaustive backend");
    auto m = std::make_unique<ExhaustiveModel>(*exhaustive);
    m->set_mode(b == Backend::exhaustive_exact ? MatchMode::exact : MatchMode::approximate);
    return m;
}

json TrainedModel::to_json() const {
    json j{{"format", "skp-model"},
           {"version", 1},
           {"backend", backend_kind},
           {"assignment", assignment},
           {"seed", seed},
           {"vocab", vocab.tokens()},
           {"forbidden", std::vector<std::string>(forbidden.begin(), forbidden.end())},
           {"bounds",
            {{"seq_n", bounds.seq_n},
             {"seq_l", bounds.seq_l},
             {"freq_toks", std::vector<std::string>(bounds.freq_toks.begin(), bounds.freq_toks.end())}}},
           {"hyperparameters", hyperparameters},
           {"training_index", training_index}};
    if (exhaustive) j["exhaustive"] = exhaustive->to_json();
    if (neural) {
        Seq2SeqParams& p = const_cast<Seq2SeqParams&>(*neural);
        json tensors = json::object();
        for (const auto& ref : tensor_refs(p)) {
            std::vector<double> data(ref.data, ref.data + ref.size());
            tensors[ref.name] = json{{"rows", ref.rows}, {"cols", ref.cols}, {"data", data}};
        }
        j["neural"] = json{{"hidden", neural->hidden},
                           {"vocab_size", neural->vocab_size},
                           {"tensors", tensors}};
    }
    return j;
}

TrainedModel TrainedModel::from_json(const json& j) {
    if (!j.contains("format") || j["format"] != "skp-model")
        throw ConfigError("not a skp model file");
    TrainedModel m;
    m.assignment = j.at("assignment").get<std::string>();
    m.backend_kind = j.at("backend").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    {
        std::set<std::string> toks;
        for (const auto& t : j.at("vocab")) toks.insert(t.get<std::string>());
        m.vocab = Vocabulary::build(toks);
    }
    for (const auto& t : j.at("forbidden")) m.forbidden.insert(t.get<std::string>());
    m.bounds.seq_n = j.at("bounds").at("seq_n").get<int>();
    m.bounds.seq_l = j.at("bounds").at("seq_l").get<int>();
    for (const auto& t : j.at("bounds").at("freq_toks")) m.bounds.freq_toks.insert(t.get<std::string>());
    m.hyperparameters = j.value("hyperparameters", json::object());
    for (const auto& t : j.at("training_index")) m.training_index.push_back(t.get<std::string>());

    if (j.contains("exhaustive")) m.exhaustive = ExhaustiveModel::from_json(j["exhaustive"]);
    if (j.contains("neural")) {
        const auto& jn = j["neural"];
        Seq2SeqParams p =
            Seq2SeqParams::make(jn.at("vocab_size").get<int>(), jn.at("hidden").get<int>());
        for (auto& ref : tensor_refs(p)) {
            const auto& jt = jn.at("tensors").at(ref.name);
            if (jt.at("rows").get<long>() != ref.rows || jt.at("cols").get<long>() != ref.cols)
                throw ConfigError("tensor shape mismatch for " + ref.name);
            const auto& data = jt.at("data");
            for (long i = 0; i < ref.size(); ++i) ref.data[i] = data[static_cast<size_t>(i)].get<double>();
        }
        m.neural = std::move(p);
    }
    return m;
}

void TrainedModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << to_json().dump(1) << '\n';
}

TrainedModel TrainedModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file: " + path);
    json j;
    in >> j;
    return from_json(j);
}

std::string canonical_renamed_body(const std::string& source,
                                   const std::set<std::string>& forbidden) {
    auto split = split_header(tokenize(source));
    auto all = split.all();
    auto [renamed, table] = rename(all, forbidden);
    std::vector<TokenStatement> body(renamed.end() - static_cast<long>(split.body.size()),
                                     renamed.end());
    return detokenize_program(body);
}

TrainOutput run_train(const AssignmentConfig& cfg, Checker& checker,
                      const std::string& pair_dump_path) {
    auto check_fn = [&](const std::string& src) { return checker.check(src); };

    auto submissions = load_corpus(cfg.corpus_path);
    DatasetSplit split = split_dataset(submissions, check_fn, cfg.split);

    std::vector<std::string> train_sources;
    for (const auto& s : split.train) train_sources.push_back(s.source);

    auto forbidden = learn_forbidden_list(
        train_sources, [&](const std::string& src) { return checker.check(src).pass; },
        cfg.forbidden);

    long renamed_still_correct = 0;
    std::vector<std::vector<TokenStatement>> renamed_bodies;
    for (const auto& src : train_sources) {
        auto parts = split_header(tokenize(src));
        auto [renamed, table] = rename(parts.all(), forbidden);
        std::vector<TokenStatement> body(renamed.end() - static_cast<long>(parts.body.size()),
                                         renamed.end());
        renamed_bodies.push_back(std::move(body));
        if (checker.check(rename_source(src, forbidden)).pass) ++renamed_still_correct;
    }

    RegularityBounds bounds = compute_bounds(renamed_bodies, cfg.bounds);
    auto filtered = regularity_filter(renamed_bodies, bounds);
    const double retention =
        renamed_bodies.empty()
            ? 0.0
            : static_cast<double>(filtered.size()) / static_cast<double>(renamed_bodies.size());

    std::vector<TrainingPair> pairs;
    for (const auto& body : filtered) {
        auto ps = generate_training_pairs(body);
        pairs.insert(pairs.end(), ps.begin(), ps.end());
    }
    if (pairs.empty()) throw EmptyTrainingSet();

    if (!pair_dump_path.empty()) {
        std::ofstream dump(pair_dump_path);
        for (const auto& p : pairs)
            dump << json{{"x", model_tokens(p.x)}, {"xp", model_tokens(p.xp)}, {"y", model_tokens(p.y)}}
                        .dump()
                 << '\n';
    }

    TrainedModel model;
    model.assignment = cfg.name;
    model.seed = cfg.seed;
    model.forbidden = forbidden;
    model.bounds = bounds;
    {
        std::set<std::string> vocab_tokens = bounds.freq_toks;
        model.vocab = Vocabulary::build(vocab_tokens);
    }
    {
        std::set<std::string> index;
        for (const auto& body : filtered) index.insert(detokenize_program(body));
        model.training_index.assign(index.begin(), index.end());
    }

    json report{{"assignment", cfg.name},
                {"split",
                 {{"submissions", submissions.size()},
                  {"early", split.early_total},
                  {"late", split.late_total},
                  {"early_correct", split.early_correct},
                  {"train", split.train.size()},
                  {"validation", split.validation.size()},
                  {"test", split.test.size()}}},
                {"forbidden", std::vector<std::string>(forbidden.begin(), forbidden.end())},
                {"forbidden_retention",
                 train_sources.empty() ? 0.0
                                       : static_cast<double>(renamed_still_correct) /
                                             static_cast<double>(train_sources.size())},
                {"bounds",
                 {{"seq_n", bounds.seq_n},
                  {"seq_l", bounds.seq_l},
                  {"freq_toks_size", bounds.freq_toks.size()}}},
                {"regularity_retention", retention},
                {"filtered_train", filtered.size()},
                {"pair_count", pairs.size()},
                {"vocab_size", model.vocab.size()}};

    if (cfg.backend == Backend::neural) {
        model.backend_kind = "neural";
        std::vector<PairExample> train_ex, val_ex;
        for (const auto& p : pairs) train_ex.push_back(to_example(p, model.vocab));
        for (const auto& s : split.validation) {
            auto parts = split_header(tokenize(s.source));
            auto [renamed, table] = rename(parts.all(), forbidden);
            std::vector<TokenStatement> body(renamed.end() - static_cast<long>(parts.body.size()),
                                             renamed.end());
            for (const auto& p : generate_training_pairs(body))
                val_ex.push_back(to_example(p, model.vocab));
        }
        TrainReport treport;
        Seq2SeqParams params =
            train_neural(train_ex, val_ex, model.vocab, cfg.neural, cfg.seed, &treport);
        model.neural = std::move(params);
        model.hyperparameters = json{{"hidden", cfg.neural.hidden},
                                     {"epochs", cfg.neural.epochs},
                                     {"batch_size", cfg.neural.batch_size},
                                     {"learning_rate", cfg.neural.learning_rate},
                                     {"rms_decay", cfg.neural.rms_decay},
                                     {"rms_epsilon", cfg.neural.rms_epsilon},
                                     {"init_range", cfg.neural.init_range},
                                     {"k", cfg.k},
                                     {"budget", cfg.budget}};
        json epochs = json::array();
        for (const auto& e : treport.epochs)
            epochs.push_back(json{{"epoch", e.epoch}, {"train_ce", e.train_ce}, {"val_ce", e.val_ce}});
        report["epochs"] = epochs;
        report["best_epoch"] = treport.best_epoch;
        report["best_val_ce"] = treport.best_val_ce;
        if (treport.validation_empty) report["warning"] = "empty validation set; kept final epoch";
    } else {
        model.backend_kind = "exhaustive";
        ExhaustiveModel ex;
        ex.train(pairs);
        report["fragment_count"] = ex.fragment_count();
        model.exhaustive = std::move(ex);
        model.hyperparameters = json{{"k", cfg.k}, {"budget", cfg.budget}};
    }

    return {std::move(model), std::move(report)};
}

CorrectOutcome run_correct(const AssignmentConfig& cfg, const TrainedModel& model,
                           Checker& checker, const std::string& source,
                           std::vector<json>* trace) {
    const auto t0 = std::chrono::steady_clock::now();
    CorrectOutcome out;

    auto parts = split_header(tokenize(source));
    auto all = parts.all();
    auto [renamed, table] = rename(all, model.forbidden);
    std::vector<TokenStatement> header(renamed.begin(),
                                       renamed.begin() + static_cast<long>(parts.header.size()));
    std::vector<TokenStatement> body(renamed.begin() + static_cast<long>(parts.header.size()),
                                     renamed.end());

    auto predictor = model.predictor(cfg.backend);
    CandidateSpace space = build_candidate_space(body, *predictor, cfg.k);

    std::string corrected_renamed_body;
    auto accept = [&](const std::vector<int>& sel) {
        std::vector<TokenStatement> cand_body = materialize(space, sel);
        std::vector<TokenStatement> full = header;
        full.insert(full.end(), cand_body.begin(), cand_body.end());
        const std::string cand_source = restore(full, table);
        Verdict v = checker.check(cand_source);
        const bool is_origin = std::all_of(sel.begin(), sel.end(), [](int r) { return r == 0; });
        if (is_origin) out.original = v;
        if (v.pass) {
            out.corrected_source = cand_source;
            corrected_renamed_body = detokenize_program(cand_body);
        }
        return v.pass;
    };

    TraceFn trace_fn = nullptr;
    if (trace) {
        trace_fn = [&](long index, double cost, const std::vector<int>& sel, bool ok) {
            trace->push_back(json{{"index", index},
                                  {"cost", cost},
                                  {"selection", sel},
                                  {"verdict", ok ? "pass" : "fail"}});
        };
    }

    SearchConfig scfg{cfg.k, cfg.budget, cfg.dedupe};
    SearchResult res = program_search(space, accept, scfg, trace_fn);

    out.fixed = res.success;
    out.enumeration_index = res.enumeration_index;
    out.cost = res.cost;
    out.checked = res.checked;
    if (res.success) {
        out.already_correct = out.original.pass;
        out.classification = classify(out.original, corrected_renamed_body, model.training_index);
    }
    out.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

json EvaluateRecord::to_json() const {
    return json{{"id", id},
                {"fixed", fixed},
                {"enumeration_index", enumeration_index},
                {"cost", cost},
                {"checked", checked},
                {"original_kind", original_kind},
                {"fixed_kind", fixed_kind},
                {"fresh", fresh},
                {"elapsed_sec", elapsed_sec},
                {"corrected_source", corrected_source}};
}

EvaluateRecord EvaluateRecord::from_json(const json& j) {
    EvaluateRecord r;
    r.id = j.at("id").get<std::string>();
    r.fixed = j.at("fixed").get<bool>();
    r.enumeration_index = j.at("enumeration_index").get<long>();
    r.cost = j.at("cost").get<double>();
    r.checked = j.at("checked").get<long>();
    r.original_kind = j.at("original_kind").get<std::string>();
    r.fixed_kind = j.at("fixed_kind").get<std::string>();
    r.fresh = j.at("fresh").get<bool>();
    r.elapsed_sec = j.at("elapsed_sec").get<double>();
    r.corrected_source = j.value("corrected_source", "");
    return r;
}

namespace {

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

json metrics_from_records(const std::vector<EvaluateRecord>& records, size_t n_test) {
    long fixed = 0, syn = 0, sem = 0, fresh = 0;
    for (const auto& r : records) {
        if (!r.fixed) continue;
        ++fixed;
        if (r.fixed_kind == "syntactic")
            ++syn;
        else
            ++sem;
        if (r.fresh) ++fresh;
    }
    json m{{"n_test", n_test},
           {"n_fixed", fixed},
           {"accuracy", n_test == 0 ? 0.0 : round3(static_cast<double>(fixed) / static_cast<double>(n_test))},
           {"breakdown",
            {{"syn", syn},
             {"sem", sem},
             {"fresh", fresh},
             {"syn_pct", fixed == 0 ? 0.0
                                    : round3(100.0 * static_cast<double>(syn) / static_cast<double>(fixed))},
             {"fresh_pct", fixed == 0 ? 0.0
                                      : round3(100.0 * static_cast<double>(fresh) /
                                               static_cast<double>(fixed))}}}};
    return m;
}

EvaluateOutput run_evaluate(const AssignmentConfig& cfg, const TrainedModel& model,
                            Checker& checker, const std::string& results_path, int jobs) {
    auto check_fn = [&](const std::string& src) { return checker.check(src); };
    auto submissions = load_corpus(cfg.corpus_path);
    DatasetSplit split = split_dataset(submissions, check_fn, cfg.split);

    EvaluateOutput out;
    std::set<std::string> done_ids;
    if (!results_path.empty() && fs::exists(results_path)) {
        std::ifstream in(results_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto rec = EvaluateRecord::from_json(json::parse(line));
            done_ids.insert(rec.id);
            out.records.push_back(std::move(rec));
        }
    }

    std::ofstream append;
    if (!results_path.empty())
        append.open(results_path, std::ios::app);

    std::vector<const TestEntry*> todo;
    for (const auto& entry : split.test)
        if (!done_ids.count(entry.sub.id)) todo.push_back(&entry);

    auto evaluate_one = [&](const TestEntry& entry, Checker& chk) {
        CorrectOutcome c = run_correct(cfg, model, chk, entry.sub.source);
        EvaluateRecord rec;
        rec.id = entry.sub.id;
        rec.fixed = c.fixed;
        rec.enumeration_index = c.enumeration_index;
        rec.cost = c.cost;
        rec.checked = c.checked;
        rec.original_kind = failure_kind_name(entry.original.kind);
        rec.fixed_kind = c.fixed ? failure_kind_name(c.classification.fixed_kind) : "";
        rec.fresh = c.fixed && c.classification.fresh;
        rec.elapsed_sec = c.elapsed_sec;
        rec.corrected_source = c.corrected_source;
        return rec;
    };

    if (jobs <= 1) {
        for (const TestEntry* entry : todo) {
            EvaluateRecord rec = evaluate_one(*entry, checker);
            if (append.is_open()) {
                append << rec.to_json().dump() << '\n';
                append.flush();
            }
            out.records.push_back(std::move(rec));
        }
    } else {
        std::atomic<size_t> next{0};
        std::mutex sink;
        auto worker = [&]() {
            Checker local(cfg.interpreter, checker.suite());
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= todo.size()) break;
                EvaluateRecord rec = evaluate_one(*todo[i], local);
                std::lock_guard<std::mutex> lock(sink);
                if (append.is_open()) {
                    append << rec.to_json().dump() << '\n';
                    append.flush();
                }
                out.records.push_back(std::move(rec));
            }
        };
        std::vector<std::thread> pool;
        const int n = std::min<int>(jobs, static_cast<int>(std::max<size_t>(todo.size(), 1)));
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double sum_elapsed = 0.0;
    for (const auto& r : out.records) sum_elapsed += r.elapsed_sec;

    out.report = json{{"assignment", cfg.name},
                      {"backend", backend_name(cfg.backend)},
                      {"metrics", metrics_from_records(out.records, split.test.size())},
                      {"timing",
                       {{"avg_repair_sec",
                         out.records.empty()
                             ? 0.0
                             : sum_elapsed / static_cast<double>(out.records.size())}}}};
    return out;
}

}  // namespace skp
