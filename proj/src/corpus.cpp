#include "skp/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

namespace skp {

using nlohmann::json;

std::vector<Submission> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::vector<Submission> subs;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line);
        Submission s;
        s.id = j.at("id").get<std::string>();
        s.order_index = j.at("order").get<long>();
        s.source = j.at("source").get<std::string>();
        if (j.contains("assignment")) s.assignment = j["assignment"].get<std::string>();
        subs.push_back(std::move(s));
    }
    std::stable_sort(subs.begin(), subs.end(),
                     [](const Submission& a, const Submission& b) { return a.order_index < b.order_index; });
    return subs;
}

void save_corpus(const std::string& path, const std::vector<Submission>& subs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& s : subs) {
        json j{{"id", s.id}, {"order", s.order_index}, {"source", s.source}};
        if (!s.assignment.empty()) j["assignment"] = s.assignment;
        out << j.dump() << '\n';
    }
}

DatasetSplit split_dataset(std::vector<Submission> submissions,
                           const std::function<Verdict(const std::string&)>& check,
                           const SplitConfig& cfg) {
    std::stable_sort(submissions.begin(), submissions.end(),
                     [](const Submission& a, const Submission& b) { return a.order_index < b.order_index; });

    DatasetSplit out;
    const size_t n = submissions.size();
    const size_t early_n = static_cast<size_t>(static_cast<double>(n) * cfg.early_fraction);
    out.early_total = early_n;
    out.late_total = n - early_n;

    std::vector<Submission> early_correct;
    for (size_t i = 0; i < early_n; ++i) {
        if (check(submissions[i].source).pass) early_correct.push_back(submissions[i]);
    }
    out.early_correct = early_correct.size();
    if (early_correct.empty()) throw EmptyTrainingSet();

    const size_t train_n =
        static_cast<size_t>(static_cast<double>(early_correct.size()) * cfg.train_fraction);
    out.train.assign(early_correct.begin(), early_correct.begin() + static_cast<long>(train_n));
    out.validation.assign(early_correct.begin() + static_cast<long>(train_n), early_correct.end());

    for (size_t i = early_n; i < n; ++i) {
        Verdict v = check(submissions[i].source);
        if (v.pass) {
            ++out.late_correct;
            continue;
        }
        out.test.push_back({submissions[i], v});
    }
    return out;
}

int statement_length(const TokenStatement& s) {
    return static_cast<int>(model_tokens(s).size());
}

int max_statement_length(const std::vector<TokenStatement>& body) {
    int m = 0;
    for (const auto& s : body) m = std::max(m, statement_length(s));
    return m;
}

namespace {

// Smallest bound such that at least `pct` of the values are strictly below it.
int percentile_bound(std::vector<int> values, double pct) {
    std::sort(values.begin(), values.end());
    const double need = pct * static_cast<double>(values.size());
    const int max_v = values.empty() ? 0 : values.back();
    for (int b = 1; b <= max_v + 1; ++b) {
        auto below = std::lower_bound(values.begin(), values.end(), b) - values.begin();
        if (static_cast<double>(below) >= need) return b;
    }
    return max_v + 1;
}

}  // namespace

RegularityBounds compute_bounds(const std::vector<std::vector<TokenStatement>>& train_bodies,
                                const BoundsConfig& cfg) {
    RegularityBounds b;
    std::vector<int> line_counts, max_lengths;
    std::map<std::string, long> usage;
    long total = 0;
    for (const auto& body : train_bodies) {
        line_counts.push_back(static_cast<int>(body.size()));
        max_lengths.push_back(max_statement_length(body));
        for (const auto& s : body) {
            for (const auto& t : model_tokens(s)) {
                ++usage[t];
                ++total;
            }
        }
    }
    b.seq_n = percentile_bound(line_counts, cfg.line_percentile);
    b.seq_l = percentile_bound(max_lengths, cfg.length_percentile);

    std::vector<std::pair<std::string, long>> by_count(usage.begin(), usage.end());
    std::sort(by_count.begin(), by_count.end(), [](const auto& a, const auto& b2) {
        if (a.second != b2.second) return a.second > b2.second;
        return a.first < b2.first;
    });
    long covered = 0;
    for (const auto& [t, c] : by_count) {
        if (static_cast<double>(covered) >= cfg.token_coverage * static_cast<double>(total)) break;
        b.freq_toks.insert(t);
        covered += c;
    }
    return b;
}

bool passes_regularity(const std::vector<TokenStatement>& body, const RegularityBounds& b) {
    if (static_cast<int>(body.size()) >= b.seq_n) return false;
    if (max_statement_length(body) >= b.seq_l) return false;
    for (const auto& s : body)
        for (const auto& t : model_tokens(s))
            if (!b.freq_toks.count(t)) return false;
    return true;
}

std::vector<std::vector<TokenStatement>> regularity_filter(
    const std::vector<std::vector<TokenStatement>>& bodies, const RegularityBounds& b) {
    std::vector<std::vector<TokenStatement>> out;
    for (const auto& body : bodies)
        if (passes_regularity(body, b)) out.push_back(body);
    return out;
}

std::vector<TrainingPair> generate_training_pairs(const std::vector<TokenStatement>& body) {
    std::vector<TokenStatement> padded;
    padded.reserve(body.size() + 2);
    padded.push_back(TokenStatement::start());
    padded.insert(padded.end(), body.begin(), body.end());
    padded.push_back(TokenStatement::end());

    const size_t n = body.size();
    std::vector<TrainingPair> pairs;
    pairs.reserve(2 * n + 1);
    for (size_t i = 0; i + 1 < padded.size(); ++i)
        pairs.push_back({padded[i], padded[i + 1], TokenStatement::eps()});
    for (size_t i = 1; i + 1 < padded.size(); ++i)
        pairs.push_back({padded[i - 1], padded[i + 1], padded[i]});
    return pairs;
}

}  // namespace skp
