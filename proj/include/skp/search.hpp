#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skp/model.hpp"

namespace skp {

// One repair site: either a replacement slot for an existing statement or an
// insertion slot between two statements. entries[0] is always the artificial
// candidate (the original statement, or epsilon for insertions) with
// probability 1.
struct SiteCandidates {
    bool is_insertion = false;
    int position = 0;  // statement index for replacements, gap index for insertions
    std::vector<Candidate> entries;
};

// Product space of per-site candidate lists, interleaved
// ins(0,1), rep(1), ins(1,2), rep(2), ..., rep(n), ins(n,n+1).
struct CandidateSpace {
    std::vector<SiteCandidates> sites;

    size_t site_count() const { return sites.size(); }
    double full_space_size() const;
};

// Candidates below this probability would produce near-infinite costs and
// are dropped at construction.
inline constexpr double kMinCandidateProb = 1e-12;

// Builds the 2n+1 site lists for a renamed body (unpadded). Replacement list
// i queries the model with (X_{i-1}, X_{i+1}) and gets the original
// statement prepended at probability 1; insertion list (i, i+1) queries with
// (X_i, X_{i+1}) and gets epsilon prepended. Model candidates equal to the
// artificial one are dropped.
CandidateSpace build_candidate_space(const std::vector<TokenStatement>& body,
                                     const PredictionModel& model, int k);

// Negative log-likelihood of a selection (one rank per site).
double program_cost(const CandidateSpace& space, const std::vector<int>& selection);

// Applies a selection: insertion/replacement choices interleaved in site
// order; epsilon selections produce no statement.
std::vector<TokenStatement> materialize(const CandidateSpace& space,
                                        const std::vector<int>& selection);

struct SearchConfig {
    int k = 10;          // candidates per site
    long budget = 5000;  // max programs checked
    bool dedupe = true;  // skip selections already enqueued once
};

struct SearchResult {
    bool success = false;
    std::vector<int> selection;
    double cost = 0.0;
    long enumeration_index = 0;  // 1-based index of the returned program
    long checked = 0;            // total candidate programs checked
};

// Called after each checked candidate: (index, cost, selection, accepted).
using TraceFn =
    std::function<void(long, double, const std::vector<int>&, bool)>;

// Best-first enumeration over the candidate space in nondecreasing cost
// order. Pops the cheapest unchecked selection, asks `accept`, stops on the
// first accepted program or after `budget` checks. Ties are broken by
// lexicographic selection order. Throws std::logic_error if popped costs
// ever decrease.
SearchResult program_search(const CandidateSpace& space,
                            const std::function<bool(const std::vector<int>&)>& accept,
                            const SearchConfig& cfg, const TraceFn& trace = nullptr);

}  // namespace skp
