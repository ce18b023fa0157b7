#pragma once

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "skp/checker.hpp"
#include "skp/token.hpp"

namespace skp {

struct Submission {
    std::string id;
    long order_index = 0;  // submission-time rank within the assignment
    std::string source;
    std::string assignment;
};

// JSON-lines corpus: one {"id", "order", "source"} object per line.
std::vector<Submission> load_corpus(const std::string& path);
void save_corpus(const std::string& path, const std::vector<Submission>& subs);

struct SplitConfig {
    double early_fraction = 0.9;  // first share of submissions by time
    double train_fraction = 0.9;  // share of early-correct used for training
};

struct TestEntry {
    Submission sub;
    Verdict original;
};

struct DatasetSplit {
    std::vector<Submission> train;       // early correct
    std::vector<Submission> validation;  // early correct
    std::vector<TestEntry> test;         // late incorrect, with their verdicts
    size_t early_total = 0;
    size_t late_total = 0;
    size_t early_correct = 0;
    size_t late_correct = 0;
};

// Temporal split: early 90% filtered to correct programs (then 90/10 into
// train/validation), late 10% filtered to incorrect programs. Early-incorrect
// and late-correct submissions are discarded.
DatasetSplit split_dataset(std::vector<Submission> submissions,
                           const std::function<Verdict(const std::string&)>& check,
                           const SplitConfig& cfg = {});

struct EmptyTrainingSet : std::runtime_error {
    EmptyTrainingSet() : std::runtime_error("EmptyTrainingSet: no correct programs in early part") {}
};

struct BoundsConfig {
    double line_percentile = 0.97;
    double length_percentile = 0.97;
    double token_coverage = 0.999;
};

struct RegularityBounds {
    int seq_n = 0;                     // statement-count bound (strict)
    int seq_l = 0;                     // per-statement token-length bound (strict)
    std::set<std::string> freq_toks;   // admissible token set
};

// Statement length as the model sees it (indent units included).
int statement_length(const TokenStatement& s);
int max_statement_length(const std::vector<TokenStatement>& body);

RegularityBounds compute_bounds(const std::vector<std::vector<TokenStatement>>& train_bodies,
                                const BoundsConfig& cfg = {});

bool passes_regularity(const std::vector<TokenStatement>& body, const RegularityBounds& b);

std::vector<std::vector<TokenStatement>> regularity_filter(
    const std::vector<std::vector<TokenStatement>>& bodies, const RegularityBounds& b);

struct TrainingPair {
    TokenStatement x;   // statement before the hole
    TokenStatement xp;  // statement after the hole
    TokenStatement y;   // missing statement (may be epsilon)
};

// Pads the body with _start_/_end_ and emits the 2n+1 fragment pairs: n+1
// adjacent pairs mapping to epsilon and n skip pairs regenerating the middle
// statement.
std::vector<TrainingPair> generate_training_pairs(const std::vector<TokenStatement>& body);

}  // namespace skp
