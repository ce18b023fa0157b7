#pragma once

#include <string>
#include <vector>

#include "skp/token.hpp"

namespace skp {

// The conditioning context: the statements before and after a hole.
struct PartialFragment {
    TokenStatement before;
    TokenStatement after;
};

struct Candidate {
    TokenStatement stmt;  // may be epsilon
    double prob = 0.0;
};

// Top-k candidate statements for one fragment, descending probability. The
// probabilities are genuine model probabilities and need not sum to 1.
struct PredictionList {
    std::vector<Candidate> candidates;

    bool empty() const { return candidates.empty(); }
    size_t size() const { return candidates.size(); }
};

// Backend-agnostic prediction surface consumed by the search module.
class PredictionModel {
public:
    virtual ~PredictionModel() = default;
    virtual PredictionList predict(const PartialFragment& frag, int k) const = 0;
};

}  // namespace skp
