// skp: statement-level corrector for small programming assignments.
//
// Subcommands: train, correct, evaluate, synth-corpus.
// Exit codes: 0 success, 1 repair failure / degenerate result, 2 bad config.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "skp/pipeline.hpp"
#include "skp/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw skp::ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << j.dump(2) << '\n';
}

skp::AssignmentConfig load_config(const std::string& path, const std::string& backend,
                                  long seed_override) {
    auto cfg = skp::AssignmentConfig::load(path);
    if (!backend.empty()) cfg.backend = skp::backend_from_name(backend);
    if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
    return cfg;
}

void print_train_report(const json& r) {
    const auto& s = r["split"];
    std::cout << "assignment      " << r["assignment"].get<std::string>() << "\n"
              << "submissions     " << s["submissions"] << "\n"
              << "train/val/test  " << s["train"] << " / " << s["validation"] << " / "
              << s["test"] << "\n"
              << "forbidden       " << r["forbidden"].size() << " names, retention "
              << r["forbidden_retention"].get<double>() << "\n"
              << "bounds          seq_n " << r["bounds"]["seq_n"] << ", seq_l "
              << r["bounds"]["seq_l"] << ", freq_toks " << r["bounds"]["freq_toks_size"] << "\n"
              << "regularity      kept " << r["filtered_train"] << " ("
              << r["regularity_retention"].get<double>() << ")\n"
              << "pairs           " << r["pair_count"] << "\n"
              << "vocab           " << r["vocab_size"] << "\n";
    if (r.contains("fragment_count"))
        std::cout << "fragments       " << r["fragment_count"] << "\n";
    if (r.contains("best_epoch"))
        std::cout << "best epoch      " << r["best_epoch"] << " (val ce "
                  << r["best_val_ce"].get<double>() << ")\n";
}

void print_eval_report(const json& r) {
    const auto& m = r["metrics"];
    std::cout << "assignment " << r["assignment"].get<std::string>() << "  backend "
              << r["backend"].get<std::string>() << "\n"
              << "#test " << m["n_test"] << "  fixed " << m["n_fixed"] << "  accuracy "
              << m["accuracy"].get<double>() << "\n";
    const auto& b = m["breakdown"];
    std::cout << "syn " << b["syn"] << "  sem " << b["sem"] << "  fresh " << b["fresh"]
              << "  syn% " << b["syn_pct"].get<double>() << "  fresh% "
              << b["fresh_pct"].get<double>() << "\n"
              << "avg repair time " << r["timing"]["avg_repair_sec"].get<double>() << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skp: data-driven corrector for small programming assignments"};
    app.require_subcommand(1);

    std::string config_path, backend_override, model_path, out_path, report_path;
    std::string input_path, results_path, trace_path, pair_dump, out_dir;
    long seed_override = -1;

    auto* train = app.add_subcommand("train", "train a model from a submission corpus");
    train->add_option("--config", config_path, "assignment config file")->required();
    train->add_option("--backend", backend_override, "override config backend");
    train->add_option("--seed", seed_override, "override config seed");
    train->add_option("--out", out_path, "model output path (default <config dir>/model.json)");
    train->add_option("--report", report_path, "write the training report as JSON");
    train->add_option("--dump-pairs", pair_dump, "dump training pairs as JSON lines");

    auto* correct = app.add_subcommand("correct", "repair a single submission");
    correct->add_option("--config", config_path, "assignment config file")->required();
    correct->add_option("--model", model_path, "trained model file")->required();
    correct->add_option("--input", input_path, "submission source file")->required();
    correct->add_option("--backend", backend_override, "override config backend");
    correct->add_option("--trace", trace_path, "write the enumeration trace as JSON lines");

    auto* evaluate = app.add_subcommand("evaluate", "run the corrector over the test split");
    std::vector<std::string> compare_specs;
    evaluate->add_option("--config", config_path, "assignment config file")->required();
    evaluate->add_option("--model", model_path, "trained model file")->required();
    evaluate->add_option("--backend", backend_override, "override config backend");
    evaluate->add_option("--report", report_path, "write the evaluation report as JSON");
    evaluate->add_option("--results", results_path,
                         "JSON-lines record file; existing records are reused (resumable)");
    evaluate->add_option("--compare", compare_specs,
                         "additional BACKEND:MODELFILE runs reported side by side "
                         "(e.g. neural:model_nn.json); not resumable");
    int jobs = 1;
    evaluate->add_option("--jobs", jobs, "repair test submissions concurrently");

    auto* synth = app.add_subcommand("synth-corpus", "generate the synthetic benchmark corpus");
    synth->add_option("--out", out_dir, "output directory")->required();
    long synth_seed = 1;
    int synth_correct_n = 280, synth_test_n = 34;
    std::vector<std::string> synth_assignments;
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--correct", synth_correct_n, "correct variants per assignment");
    synth->add_option("--test", synth_test_n, "test mutants per assignment");
    synth->add_option("--assignment", synth_assignments,
                      "assignment names (default: evalpoly everyOther deriv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            auto cfg = load_config(config_path, backend_override, seed_override);
            skp::Checker checker(cfg.interpreter, skp::TestSuite::load(cfg.suite_path));
            auto out = skp::run_train(cfg, checker, pair_dump);
            const std::string model_out =
                out_path.empty()
                    ? (fs::path(config_path).parent_path() / "model.json").string()
                    : out_path;
            out.model.save(model_out);
            print_train_report(out.report);
            std::cout << "model written to " << model_out << "\n";
            if (!report_path.empty()) write_json(report_path, out.report);
            return 0;
        }
        if (correct->parsed()) {
            auto cfg = load_config(config_path, backend_override, seed_override);
            auto model = skp::TrainedModel::load(model_path);
            skp::Checker checker(cfg.interpreter, skp::TestSuite::load(cfg.suite_path));
            const std::string source = read_file(input_path);
            std::vector<json> trace;
            auto outcome = skp::run_correct(cfg, model, checker, source,
                                            trace_path.empty() ? nullptr : &trace);
            if (!trace_path.empty()) {
                std::ofstream t(trace_path);
                for (const auto& rec : trace) t << rec.dump() << '\n';
            }
            if (!outcome.fixed) {
                std::cerr << "FAIL: no correct program within budget (" << outcome.checked
                          << " candidates checked, " << outcome.elapsed_sec << " s)\n";
                return 1;
            }
            std::cout << outcome.corrected_source;
            std::cerr << "enumeration index " << outcome.enumeration_index << ", cost "
                      << outcome.cost << ", " << outcome.elapsed_sec << " s\n";
            return 0;
        }
        if (evaluate->parsed()) {
            auto cfg = load_config(config_path, backend_override, seed_override);
            auto model = skp::TrainedModel::load(model_path);
            skp::Checker checker(cfg.interpreter, skp::TestSuite::load(cfg.suite_path));
            auto out = skp::run_evaluate(cfg, model, checker, results_path, jobs);
            print_eval_report(out.report);

            if (!compare_specs.empty()) {
                json comparison = json::array();
                comparison.push_back(json{{"backend", skp::backend_name(cfg.backend)},
                                          {"model", model_path},
                                          {"metrics", out.report["metrics"]}});
                for (const auto& spec : compare_specs) {
                    const auto colon = spec.find(':');
                    if (colon == std::string::npos)
                        throw skp::ConfigError("--compare expects BACKEND:MODELFILE, got " + spec);
                    skp::AssignmentConfig alt = cfg;
                    alt.backend = skp::backend_from_name(spec.substr(0, colon));
                    const std::string alt_path = spec.substr(colon + 1);
                    auto alt_model = skp::TrainedModel::load(alt_path);
                    auto alt_out = skp::run_evaluate(alt, alt_model, checker);
                    comparison.push_back(json{{"backend", skp::backend_name(alt.backend)},
                                              {"model", alt_path},
                                              {"metrics", alt_out.report["metrics"]}});
                    std::cout << "compare " << skp::backend_name(alt.backend) << ": accuracy "
                              << alt_out.report["metrics"]["accuracy"].get<double>() << "\n";
                }
                out.report["comparison"] = comparison;
            }
            if (!report_path.empty()) write_json(report_path, out.report);
            return 0;
        }
        if (synth->parsed()) {
            skp::SynthConfig scfg;
            scfg.seed = static_cast<uint64_t>(synth_seed);
            scfg.n_correct = synth_correct_n;
            scfg.n_test = synth_test_n;
            if (!synth_assignments.empty()) scfg.assignments = synth_assignments;
            auto res = skp::generate_synth_corpus(out_dir, scfg);
            for (const auto& a : res.assignments)
                std::cout << a.name << ": " << a.n_correct << " correct + " << a.n_early_incorrect
                          << " early incorrect + " << a.n_test << " test mutants -> "
                          << a.corpus_path << "\n";
            return 0;
        }
    } catch (const skp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const skp::EmptyTrainingSet& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
