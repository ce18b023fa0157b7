#include "skp/neural_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace skp {

PredictionList NeuralModel::predict(const PartialFragment& frag, int k) const {
    const Eigen::VectorXd vc = fragment_context(params_, vocab_, frag);
    const auto hyps = decode_beam(params_, vocab_, vc, k, l_max_);

    std::map<std::string, Candidate> merged;
    for (const auto& hyp : hyps) {
        TokenStatement stmt = parse_model_tokens(vocab_.decode(hyp.tokens));
        const std::string key = model_text(stmt);
        auto it = merged.find(key);
        const double prob = std::exp(hyp.logprob);
        if (it == merged.end()) {
            merged.emplace(key, Candidate{std::move(stmt), prob});
        } else {
            it->second.prob += prob;
        }
    }

    PredictionList out;
    for (auto& [key, cand] : merged) out.candidates.push_back(std::move(cand));
    std::sort(out.candidates.begin(), out.candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return model_text(a.stmt) < model_text(b.stmt);
    });
    if (static_cast<int>(out.candidates.size()) > k) out.candidates.resize(static_cast<size_t>(k));
    return out;
}

}  // namespace skp
