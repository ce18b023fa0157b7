#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "skp/token.hpp"

namespace skp {

// Closed token inventory shared by both prediction backends. Reserved
// markers come first with fixed ids; the remaining tokens are sorted so a
// given token set always yields the same id assignment.
class Vocabulary {
public:
    Vocabulary() = default;

    static Vocabulary build(const std::set<std::string>& tokens);

    int id(const std::string& text) const {
        auto it = index_.find(text);
        return it == index_.end() ? -1 : it->second;
    }
    int id_or_unk(const std::string& text) const {
        int i = id(text);
        return i >= 0 ? i : unk_id();
    }
    const std::string& text(int id) const { return tokens_[static_cast<size_t>(id)]; }
    int size() const { return static_cast<int>(tokens_.size()); }
    bool contains(const std::string& text) const { return index_.count(text) > 0; }

    int bos_id() const { return id(tok::kBos); }
    int eos_id() const { return id(tok::kEos); }
    int unk_id() const { return id(tok::kUnk); }
    int eps_id() const { return id(tok::kEps); }

    const std::vector<std::string>& tokens() const { return tokens_; }

    std::vector<int> encode(const std::vector<std::string>& toks) const {
        std::vector<int> out;
        out.reserve(toks.size());
        for (const auto& t : toks) out.push_back(id_or_unk(t));
        return out;
    }
    std::vector<std::string> decode(const std::vector<int>& ids) const {
        std::vector<std::string> out;
        out.reserve(ids.size());
        for (int i : ids) out.push_back(text(i));
        return out;
    }

    static const std::vector<std::string>& reserved();

private:
    std::vector<std::string> tokens_;
    std::map<std::string, int> index_;
};

}  // namespace skp
