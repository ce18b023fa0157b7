#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skp/corpus.hpp"
#include "skp/rng.hpp"

namespace skp {

// Desk-scale benchmark generator: template solutions for small assignments,
// realized with varied identifier names as correct submissions, plus
// mutation-injected incorrect submissions (operator swap, bound off-by-one,
// statement deletion, indentation shift, dropped colon/paren).
//
// Ordering matches the temporal split: the early block holds the correct
// variants mixed with some incorrect ones, the late block holds the test
// mutants. Early size is 9x the late size so a 90/10 split cuts exactly
// between the blocks.
struct SynthConfig {
    std::vector<std::string> assignments = {"evalpoly", "everyOther", "deriv"};
    int n_correct = 280;     // correct variants per assignment
    int n_test = 34;         // late (test) mutants per assignment
    uint64_t seed = 1;
    std::string interpreter = "python3";
    bool verify = true;      // run every generated program through the checker
};

struct SynthAssignment {
    std::string name;
    std::string corpus_path;
    std::string suite_path;
    std::string config_path;
    size_t n_correct = 0;
    size_t n_early_incorrect = 0;
    size_t n_test = 0;
};

struct SynthResult {
    std::vector<SynthAssignment> assignments;
};

SynthResult generate_synth_corpus(const std::string& out_dir, const SynthConfig& cfg);

// Exposed for tests: the template realizations for one assignment.
std::vector<std::string> synth_assignment_names();
nlohmann::json synth_suite(const std::string& assignment);
std::string synth_correct_variant(const std::string& assignment, Rng& rng);
// Applies one verified-failing mutation; returns empty string if none found.
std::string synth_mutate(const std::string& source, Rng& rng);

}  // namespace skp
