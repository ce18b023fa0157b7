#pragma once

#include <string>
#include <vector>

namespace skp {

// Reserved marker tokens. None of them survives renaming in student code, so
// after the rename pass they are unambiguous.
namespace tok {
inline const std::string kStart  = "_start_";
inline const std::string kEnd    = "_end_";
inline const std::string kEps    = "_eps_";
inline const std::string kBos    = "_bos_";
inline const std::string kEos    = "_eos_";
inline const std::string kUnk    = "_unk_";
inline const std::string kIndent = "_indent_";
}  // namespace tok

// One physical line of code as a sequence of atomic lexemes. Indentation is
// kept as a depth count (one unit per two spaces) rather than as tokens; the
// model-facing serialization re-expands it to kIndent tokens.
//
// The empty statement epsilon is represented by an empty token list.
struct TokenStatement {
    std::vector<std::string> tokens;
    int indent_depth = 0;

    bool is_eps() const { return tokens.empty(); }
    bool is_start() const { return tokens.size() == 1 && tokens[0] == tok::kStart; }
    bool is_end() const { return tokens.size() == 1 && tokens[0] == tok::kEnd; }
    bool is_marker() const { return is_eps() || is_start() || is_end(); }

    static TokenStatement eps() { return {}; }
    static TokenStatement start() { return {{tok::kStart}, 0}; }
    static TokenStatement end() { return {{tok::kEnd}, 0}; }

    bool operator==(const TokenStatement& o) const {
        return indent_depth == o.indent_depth && tokens == o.tokens;
    }
    bool operator<(const TokenStatement& o) const {
        if (indent_depth != o.indent_depth) return indent_depth < o.indent_depth;
        return tokens < o.tokens;
    }
};

// Serialization used by the prediction models: leading indent units become
// explicit kIndent tokens, epsilon becomes the single kEps token.
std::vector<std::string> model_tokens(const TokenStatement& s);

// Inverse of model_tokens. Leading kIndent tokens set the depth; a lone kEps
// or an empty sequence yields epsilon.
TokenStatement parse_model_tokens(const std::vector<std::string>& toks);

// Space-joined model token text; statement key material for the exhaustive
// model and for equality checks.
std::string model_text(const TokenStatement& s);

// Canonical source form: indent as two spaces per level, single spaces
// between tokens. Marker statements produce an empty string.
std::string detokenize(const TokenStatement& s);

// Canonical multi-line text of a statement list (markers skipped).
std::string detokenize_program(const std::vector<TokenStatement>& stmts);

}  // namespace skp
