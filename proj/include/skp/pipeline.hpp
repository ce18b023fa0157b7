#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skp/checker.hpp"
#include "skp/corpus.hpp"
#include "skp/exhaustive.hpp"
#include "skp/neural_model.hpp"
#include "skp/search.hpp"
#include "skp/tokenizer.hpp"
#include "skp/trainer.hpp"
#include "skp/vocab.hpp"

namespace skp {

enum class Backend { exhaustive_exact, exhaustive_approx, neural };

std::string backend_name(Backend b);
Backend backend_from_name(const std::string& name);

struct AssignmentConfig {
    std::string name;
    std::string corpus_path;
    std::string suite_path;
    Backend backend = Backend::exhaustive_exact;
    std::string interpreter = "python3";
    int k = 10;
    long budget = 5000;
    uint64_t seed = 1;
    bool dedupe = true;
    SplitConfig split;
    BoundsConfig bounds;
    ForbiddenLearnConfig forbidden;
    TrainHyper neural;

    static AssignmentConfig load(const std::string& path);
    static AssignmentConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
    nlohmann::json to_json() const;
};

// Everything `correct` needs, self-contained: renaming context, bounds,
// vocabulary, the trained backend and the training-program index used for
// freshness classification.
struct TrainedModel {
    std::string assignment;
    std::string backend_kind;  // "exhaustive" or "neural"
    uint64_t seed = 0;
    std::set<std::string> forbidden;
    RegularityBounds bounds;
    Vocabulary vocab;
    std::vector<std::string> training_index;  // sorted canonical renamed bodies
    nlohmann::json hyperparameters;

    std::optional<ExhaustiveModel> exhaustive;
    std::optional<Seq2SeqParams> neural;

    // Prediction view for a configured backend; the exhaustive table serves
    // both match modes.
    std::unique_ptr<PredictionModel> predictor(Backend b) const;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
    static TrainedModel load(const std::string& path);
};

struct TrainOutput {
    TrainedModel model;
    nlohmann::json report;
};

// Full training flow: split -> forbidden-list learning -> rename -> bounds
// -> regularity filter -> pairs -> backend training. `pair_dump_path`, when
// set, receives the generated pairs as JSON lines.
TrainOutput run_train(const AssignmentConfig& cfg, Checker& checker,
                      const std::string& pair_dump_path = "");

struct CorrectOutcome {
    bool fixed = false;
    bool already_correct = false;
    std::string corrected_source;
    long enumeration_index = 0;
    double cost = 0.0;
    long checked = 0;
    Verdict original;
    RepairClassification classification;
    double elapsed_sec = 0.0;
};

// Repairs one submission. `trace` receives one JSON object per checked
// candidate when provided.
CorrectOutcome run_correct(const AssignmentConfig& cfg, const TrainedModel& model,
                           Checker& checker, const std::string& source,
                           std::vector<nlohmann::json>* trace = nullptr);

struct EvaluateRecord {
    std::string id;
    bool fixed = false;
    long enumeration_index = 0;
    double cost = 0.0;
    long checked = 0;
    std::string original_kind;
    std::string fixed_kind;
    bool fresh = false;
    double elapsed_sec = 0.0;
    std::string corrected_source;

    nlohmann::json to_json() const;
    static EvaluateRecord from_json(const nlohmann::json& j);
};

struct EvaluateOutput {
    std::vector<EvaluateRecord> records;
    nlohmann::json report;  // metrics + timing sections
};

// Runs `correct` over the temporal test split. `results_path`, when given,
// is a JSON-lines file: existing records are loaded and their submissions
// skipped, new records appended (evaluation is resumable). Metrics are
// always recomputed from the full record set. With jobs > 1 submissions are
// repaired concurrently, each worker with its own checker; the metrics are
// independent of arrival order.
EvaluateOutput run_evaluate(const AssignmentConfig& cfg, const TrainedModel& model,
                            Checker& checker, const std::string& results_path = "",
                            int jobs = 1);

// Metrics recomputation used by both run_evaluate and the report tests.
nlohmann::json metrics_from_records(const std::vector<EvaluateRecord>& records, size_t n_test);

// Canonical renamed body of a source program: what the freshness index
// stores and compares against.
std::string canonical_renamed_body(const std::string& source,
                                   const std::set<std::string>& forbidden);

}  // namespace skp
