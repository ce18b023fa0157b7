#include "skp/exhaustive.hpp"

#include <algorithm>
#include <limits>

namespace skp {

using nlohmann::json;

std::string ExhaustiveModel::key_of(const PartialFragment& frag) {
    return model_text(frag.before) + "\n" + model_text(frag.after);
}

void ExhaustiveModel::train(const std::vector<TrainingPair>& pairs) {
    std::map<std::string, std::map<std::string, std::pair<TokenStatement, long>>> counts;
    std::map<std::string, long> totals;
    for (const auto& p : pairs) {
        const std::string key = key_of({p.x, p.xp});
        auto& slot = counts[key][model_text(p.y)];
        slot.first = p.y;
        ++slot.second;
        ++totals[key];
    }
    table_.clear();
    for (auto& [key, by_text] : counts) {
        Entry e;
        e.total = totals[key];
        for (auto& [text, stmt_count] : by_text) e.candidates.push_back(stmt_count);
        std::sort(e.candidates.begin(), e.candidates.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return model_text(a.first) < model_text(b.first);
        });
        table_.emplace(key, std::move(e));
    }
}

namespace {

PredictionList top_k(const ExhaustiveModel::Entry& e, int k) {
    PredictionList out;
    for (const auto& [stmt, count] : e.candidates) {
        if (static_cast<int>(out.candidates.size()) >= k) break;
        out.candidates.push_back({stmt, static_cast<double>(count) / static_cast<double>(e.total)});
    }
    return out;
}

}  // namespace

PredictionList ExhaustiveModel::predict_exact(const PartialFragment& frag, int k) const {
    auto it = table_.find(key_of(frag));
    if (it == table_.end()) return {};
    return top_k(it->second, k);
}

PredictionList ExhaustiveModel::predict_approximate(const PartialFragment& frag, int k) const {
    if (table_.empty()) return {};
    const std::string query = key_of(frag);
    long best = std::numeric_limits<long>::max();
    const Entry* best_entry = nullptr;
    // std::map iteration is key-ascending, so on distance ties the
    // lexicographically smallest key wins.
    for (const auto& [key, entry] : table_) {
        long len_gap = std::labs(static_cast<long>(key.size()) - static_cast<long>(query.size()));
        if (len_gap >= best) continue;  // distance >= length gap
        long d = levenshtein(query, key);
        if (d < best) {
            best = d;
            best_entry = &entry;
        }
    }
    if (!best_entry) return {};
    return top_k(*best_entry, k);
}

PredictionList ExhaustiveModel::predict(const PartialFragment& frag, int k) const {
    return mode_ == MatchMode::exact ? predict_exact(frag, k) : predict_approximate(frag, k);
}

json ExhaustiveModel::to_json() const {
    json entries = json::array();
    for (const auto& [key, e] : table_) {
        json cands = json::array();
        for (const auto& [stmt, count] : e.candidates)
            cands.push_back(json{{"y", model_tokens(stmt)}, {"count", count}});
        entries.push_back(json{{"key", key}, {"total", e.total}, {"cands", cands}});
    }
    return json{{"entries", entries}};
}

ExhaustiveModel ExhaustiveModel::from_json(const json& j) {
    ExhaustiveModel m;
    for (const auto& je : j.at("entries")) {
        Entry e;
        e.total = je.at("total").get<long>();
        for (const auto& jc : je.at("cands")) {
            TokenStatement s = parse_model_tokens(jc.at("y").get<std::vector<std::string>>());
            e.candidates.emplace_back(std::move(s), jc.at("count").get<long>());
        }
        m.table_.emplace(je.at("key").get<std::string>(), std::move(e));
    }
    return m;
}

long levenshtein(const std::string& a, const std::string& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<long> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<long>(j);
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<long>(i);
        for (size_t j = 1; j <= m; ++j) {
            long sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace skp
