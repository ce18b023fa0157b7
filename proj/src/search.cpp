#include "skp/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

namespace skp {

double CandidateSpace::full_space_size() const {
    double n = 1.0;
    for (const auto& s : sites) n *= static_cast<double>(s.entries.size());
    return n;
}

namespace {

SiteCandidates make_site(bool is_insertion, int position, Candidate artificial,
                         const PredictionList& preds) {
    SiteCandidates site;
    site.is_insertion = is_insertion;
    site.position = position;
    site.entries.push_back(std::move(artificial));
    const TokenStatement& art = site.entries[0].stmt;
    for (const auto& c : preds.candidates) {
        if (c.prob < kMinCandidateProb) continue;
        if (c.stmt == art) continue;  // the model regenerated the artificial candidate
        site.entries.push_back(c);
    }
    return site;
}

}  // namespace

CandidateSpace build_candidate_space(const std::vector<TokenStatement>& body,
                                     const PredictionModel& model, int k) {
    std::vector<TokenStatement> padded;
    padded.reserve(body.size() + 2);
    padded.push_back(TokenStatement::start());
    padded.insert(padded.end(), body.begin(), body.end());
    padded.push_back(TokenStatement::end());
    const size_t n = body.size();

    CandidateSpace space;
    space.sites.reserve(2 * n + 1);
    for (size_t i = 0; i + 1 < padded.size(); ++i) {
        // insertion site (X_i, X_{i+1})
        PredictionList ins = model.predict({padded[i], padded[i + 1]}, k);
        space.sites.push_back(
            make_site(true, static_cast<int>(i), {TokenStatement::eps(), 1.0}, ins));
        // replacement site for X_{i+1}, unless that is the end marker
        if (i + 2 < padded.size()) {
            PredictionList rep = model.predict({padded[i], padded[i + 2]}, k);
            space.sites.push_back(
                make_site(false, static_cast<int>(i + 1), {padded[i + 1], 1.0}, rep));
        }
    }
    return space;
}

double program_cost(const CandidateSpace& space, const std::vector<int>& selection) {
    double cost = 0.0;
    for (size_t j = 0; j < space.sites.size(); ++j)
        cost -= std::log(space.sites[j].entries[static_cast<size_t>(selection[j])].prob);
    return cost;
}

std::vector<TokenStatement> materialize(const CandidateSpace& space,
                                        const std::vector<int>& selection) {
    std::vector<TokenStatement> out;
    for (size_t j = 0; j < space.sites.size(); ++j) {
        const auto& chosen = space.sites[j].entries[static_cast<size_t>(selection[j])].stmt;
        if (chosen.is_eps() || chosen.is_start() || chosen.is_end()) continue;
        out.push_back(chosen);
    }
    return out;
}

SearchResult program_search(const CandidateSpace& space,
                            const std::function<bool(const std::vector<int>&)>& accept,
                            const SearchConfig& cfg, const TraceFn& trace) {
    if (cfg.budget < 1) throw std::invalid_argument("program_search: budget must be >= 1");
    const size_t sites = space.sites.size();

    struct QItem {
        double cost;
        std::vector<int> sel;
        bool operator>(const QItem& o) const {
            if (cost != o.cost) return cost > o.cost;
            return sel > o.sel;
        }
    };
    std::priority_queue<QItem, std::vector<QItem>, std::greater<QItem>> queue;
    std::set<std::vector<int>> seen;

    std::vector<int> origin(sites, 0);
    queue.push({program_cost(space, origin), origin});
    if (cfg.dedupe) seen.insert(origin);

    SearchResult result;
    double last_cost = -std::numeric_limits<double>::infinity();
    while (!queue.empty() && result.checked < cfg.budget) {
        QItem item = queue.top();
        queue.pop();
        if (item.cost < last_cost - 1e-9)
            throw std::logic_error("program_search: popped costs decreased");
        last_cost = item.cost;

        ++result.checked;
        const bool ok = accept(item.sel);
        if (trace) trace(result.checked, item.cost, item.sel, ok);
        if (ok) {
            result.success = true;
            result.selection = item.sel;
            result.cost = item.cost;
            result.enumeration_index = result.checked;
            return result;
        }

        for (size_t j = 0; j < sites; ++j) {
            if (item.sel[j] + 1 >= static_cast<int>(space.sites[j].entries.size())) continue;
            std::vector<int> nxt = item.sel;
            ++nxt[j];
            if (cfg.dedupe) {
                if (seen.count(nxt)) continue;
                seen.insert(nxt);
            }
            queue.push({program_cost(space, nxt), std::move(nxt)});
        }
    }
    return result;
}

}  // namespace skp
