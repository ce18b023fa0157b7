#include "skp/vocab.hpp"

#include <algorithm>

namespace skp {

const std::vector<std::string>& Vocabulary::reserved() {
    static const std::vector<std::string> r = {
        tok::kEps, tok::kBos, tok::kEos, tok::kUnk, tok::kIndent, tok::kStart, tok::kEnd,
    };
    return r;
}

Vocabulary Vocabulary::build(const std::set<std::string>& tokens) {
    Vocabulary v;
    for (const auto& t : reserved()) {
        v.index_.emplace(t, static_cast<int>(v.tokens_.size()));
        v.tokens_.push_back(t);
    }
    for (const auto& t : tokens) {
        if (v.index_.count(t)) continue;
        v.index_.emplace(t, static_cast<int>(v.tokens_.size()));
        v.tokens_.push_back(t);
    }
    return v;
}

}  // namespace skp
