#include "skp/token.hpp"

namespace skp {

std::vector<std::string> model_tokens(const TokenStatement& s) {
    if (s.is_eps()) return {tok::kEps};
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(s.indent_depth) + s.tokens.size());
    for (int i = 0; i < s.indent_depth; ++i) out.push_back(tok::kIndent);
    out.insert(out.end(), s.tokens.begin(), s.tokens.end());
    return out;
}

TokenStatement parse_model_tokens(const std::vector<std::string>& toks) {
    TokenStatement s;
    size_t i = 0;
    while (i < toks.size() && toks[i] == tok::kIndent) {
        ++s.indent_depth;
        ++i;
    }
    if (i == toks.size()) return TokenStatement::eps();
    if (toks.size() - i == 1 && toks[i] == tok::kEps) return TokenStatement::eps();
    s.tokens.assign(toks.begin() + static_cast<long>(i), toks.end());
    return s;
}

std::string model_text(const TokenStatement& s) {
    std::string out;
    bool first = true;
    for (const auto& t : model_tokens(s)) {
        if (!first) out += ' ';
        out += t;
        first = false;
    }
    return out;
}

std::string detokenize(const TokenStatement& s) {
    if (s.is_marker()) return "";
    std::string out(static_cast<size_t>(s.indent_depth) * 2, ' ');
    bool first = true;
    for (const auto& t : s.tokens) {
        if (!first) out += ' ';
        out += t;
        first = false;
    }
    return out;
}

std::string detokenize_program(const std::vector<TokenStatement>& stmts) {
    std::string out;
    for (const auto& s : stmts) {
        if (s.is_marker()) continue;
        out += detokenize(s);
        out += '\n';
    }
    return out;
}

}  // namespace skp
