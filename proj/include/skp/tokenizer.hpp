#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "skp/token.hpp"

namespace skp {

// Maximal-munch lexer for Python-like assignment code. It never needs a
// parse, so syntactically broken programs still tokenize; an unterminated
// string literal swallows the rest of its line as one literal token.
//
// Tabs in leading whitespace count as kTabWidth columns; one indent unit is
// kIndentWidth columns. Comments and blank lines are dropped.
inline constexpr int kTabWidth = 4;
inline constexpr int kIndentWidth = 2;

std::vector<TokenStatement> tokenize(const std::string& source);

// True for tokens that lex as names (identifier shape, not a keyword and not
// a literal). These are the only tokens renaming may touch.
bool is_name_token(const std::string& text);
bool is_python_keyword(const std::string& text);

// Per-program bijection original-name -> x_i, in first-occurrence order.
struct RenameTable {
    std::map<std::string, std::string> forward;   // original -> x_i
    std::map<std::string, std::string> inverse;   // x_i -> original

    bool empty() const { return forward.empty(); }
};

// Statement list split at the entry-function header. Everything up to and
// including the first `def` line is kept verbatim (modulo renaming) and is
// not exposed to the prediction model; the body is what gets repaired.
struct ProgramStatements {
    std::vector<TokenStatement> header;
    std::vector<TokenStatement> body;

    std::vector<TokenStatement> all() const {
        std::vector<TokenStatement> out = header;
        out.insert(out.end(), body.begin(), body.end());
        return out;
    }
};

ProgramStatements split_header(const std::vector<TokenStatement>& stmts);

// Renames every name token not in `forbidden` to x_i in first-occurrence
// order. Names directly following `def` keep their spelling (the checker
// calls the entry function by name) and stay un-renamed throughout.
std::pair<std::vector<TokenStatement>, RenameTable> rename(
    const std::vector<TokenStatement>& stmts, const std::set<std::string>& forbidden);

// Inverse mapping plus detokenization. x_i tokens missing from the table
// (the model invented a variable) keep their x_i spelling unless that
// collides with an original name, in which case underscores are appended.
std::string restore(const std::vector<TokenStatement>& stmts, const RenameTable& table);

// Convenience: full tokenize -> rename -> detokenize round trip of a source
// program under a fixed forbidden set.
std::string rename_source(const std::string& source, const std::set<std::string>& forbidden,
                          RenameTable* table_out = nullptr);

// Occurrence counts of name tokens across a corpus, descending count with
// lexicographic tie-break. Used by forbidden-list learning.
std::vector<std::pair<std::string, long>> name_frequencies(
    const std::vector<std::string>& sources);

struct ForbiddenLearnConfig {
    double keep_fraction = 0.98;  // growth stops once this share stays correct
};

// Learns which names must keep their spelling for renamed programs to stay
// correct: grows the set by descending frequency until >= keep_fraction of
// the corpus still passes, then greedily removes entries (ascending
// frequency) that turn out not to matter.
//
// `is_correct` runs the assignment test suite on a candidate source.
std::set<std::string> learn_forbidden_list(
    const std::vector<std::string>& correct_programs,
    const std::function<bool(const std::string&)>& is_correct,
    const ForbiddenLearnConfig& cfg = {});

}  // namespace skp
