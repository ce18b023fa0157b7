#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skp/corpus.hpp"
#include "skp/model.hpp"

namespace skp {

enum class MatchMode { exact, approximate };

// Empirical fragment-completion distribution: for every partial-fragment key
// the counts of observed missing statements. Pr(Y | X, X') is the count
// ratio. Exact mode answers only on key equality; approximate mode returns
// the distribution of the nearest key by Levenshtein distance over the
// joined token text.
class ExhaustiveModel : public PredictionModel {
public:
    struct Entry {
        long total = 0;
        // sorted by descending count, then statement text
        std::vector<std::pair<TokenStatement, long>> candidates;
    };

    static std::string key_of(const PartialFragment& frag);

    void train(const std::vector<TrainingPair>& pairs);

    PredictionList predict_exact(const PartialFragment& frag, int k) const;
    PredictionList predict_approximate(const PartialFragment& frag, int k) const;

    // PredictionModel surface; dispatches on the configured mode.
    PredictionList predict(const PartialFragment& frag, int k) const override;

    MatchMode mode() const { return mode_; }
    void set_mode(MatchMode m) { mode_ = m; }

    size_t fragment_count() const { return table_.size(); }
    const std::map<std::string, Entry>& table() const { return table_; }

    nlohmann::json to_json() const;
    static ExhaustiveModel from_json(const nlohmann::json& j);

private:
    std::map<std::string, Entry> table_;
    MatchMode mode_ = MatchMode::exact;
};

// Edit distance between character strings; small helper shared with tests.
long levenshtein(const std::string& a, const std::string& b);

}  // namespace skp
