#include "skp/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace skp {

namespace {

const std::set<std::string>& keyword_set() {
    static const std::set<std::string> kw = {
        "False", "None",   "True",  "and",    "as",     "assert", "async",
        "await", "break",  "class", "continue", "def",  "del",    "elif",
        "else",  "except", "finally", "for",  "from",   "global", "if",
        "import", "in",    "is",    "lambda", "nonlocal", "not",  "or",
        "pass",  "raise",  "return", "try",   "while",  "with",   "yield",
    };
    return kw;
}

// Longest first so maximal munch can scan in order.
const std::vector<std::string>& operator_list() {
    static const std::vector<std::string> ops = {
        "**=", "//=", ">>=", "<<=", "...",
        "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", "+=", "-=",
        "*=", "/=", "%=", "&=", "|=", "^=", ":=",
        "+", "-", "*", "/", "%", "@", "&", "|", "^", "~", "<", ">",
        "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "=",
    };
    return ops;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

// Scans a quoted literal starting at `i`. Returns false when the literal does
// not close on this line, in which case the caller keeps the rest of the line
// as one token.
bool scan_string(const std::string& line, size_t& i, std::string& out) {
    const char quote = line[i];
    size_t start = i;
    bool triple = i + 2 < line.size() && line[i + 1] == quote && line[i + 2] == quote;
    size_t j = i + (triple ? 3 : 1);
    while (j < line.size()) {
        if (line[j] == '\\' && j + 1 < line.size()) {
            j += 2;
            continue;
        }
        if (triple) {
            if (line[j] == quote && j + 2 < line.size() && line[j + 1] == quote &&
                line[j + 2] == quote) {
                out = line.substr(start, j + 3 - start);
                i = j + 3;
                return true;
            }
            ++j;
        } else {
            if (line[j] == quote) {
                out = line.substr(start, j + 1 - start);
                i = j + 1;
                return true;
            }
            ++j;
        }
    }
    return false;
}

void lex_line(const std::string& line, size_t from, std::vector<std::string>& out) {
    const auto& ops = operator_list();
    size_t i = from;
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') break;  // comment to end of line
        if (c == '\'' || c == '"') {
            std::string lit;
            if (scan_string(line, i, lit)) {
                out.push_back(std::move(lit));
            } else {
                // UnterminatedLiteral: keep the remainder as one token
                out.push_back(line.substr(i));
                i = line.size();
            }
            continue;
        }
        if (is_ident_start(c)) {
            size_t j = i + 1;
            while (j < line.size() && is_ident_char(line[j])) ++j;
            out.push_back(line.substr(i, j - i));
            i = j;
            continue;
        }
        if (is_digit(c) || (c == '.' && i + 1 < line.size() && is_digit(line[i + 1]))) {
            size_t j = i;
            while (j < line.size() && is_digit(line[j])) ++j;
            if (j < line.size() && line[j] == '.') {
                ++j;
                while (j < line.size() && is_digit(line[j])) ++j;
            }
            if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
                size_t k = j + 1;
                if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
                if (k < line.size() && is_digit(line[k])) {
                    ++k;
                    while (k < line.size() && is_digit(line[k])) ++k;
                    j = k;
                }
            }
            out.push_back(line.substr(i, j - i));
            i = j;
            continue;
        }
        bool munched = false;
        for (const auto& op : ops) {
            if (line.compare(i, op.size(), op) == 0) {
                out.push_back(op);
                i += op.size();
                munched = true;
                break;
            }
        }
        if (!munched) {
            // Unknown byte: keep it as a single-character token so broken
            // input still tokenizes.
            out.push_back(line.substr(i, 1));
            ++i;
        }
    }
}

}  // namespace

bool is_python_keyword(const std::string& text) { return keyword_set().count(text) > 0; }

bool is_name_token(const std::string& text) {
    if (text.empty() || !is_ident_start(text[0])) return false;
    for (char c : text)
        if (!is_ident_char(c)) return false;
    return !is_python_keyword(text);
}

std::vector<TokenStatement> tokenize(const std::string& source) {
    std::vector<TokenStatement> stmts;
    size_t pos = 0;
    while (pos <= source.size()) {
        size_t nl = source.find('\n', pos);
        std::string line = source.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? source.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        int cols = 0;
        size_t i = 0;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            cols += line[i] == '\t' ? kTabWidth : 1;
            ++i;
        }
        TokenStatement s;
        s.indent_depth = cols / kIndentWidth;
        lex_line(line, i, s.tokens);
        if (!s.tokens.empty()) stmts.push_back(std::move(s));
    }
    return stmts;
}

ProgramStatements split_header(const std::vector<TokenStatement>& stmts) {
    ProgramStatements out;
    size_t def_idx = stmts.size();
    for (size_t i = 0; i < stmts.size(); ++i) {
        if (!stmts[i].tokens.empty() && stmts[i].tokens[0] == "def") {
            def_idx = i;
            break;
        }
    }
    if (def_idx == stmts.size()) {
        out.body = stmts;
        return out;
    }
    out.header.assign(stmts.begin(), stmts.begin() + static_cast<long>(def_idx) + 1);
    out.body.assign(stmts.begin() + static_cast<long>(def_idx) + 1, stmts.end());
    return out;
}

std::pair<std::vector<TokenStatement>, RenameTable> rename(
    const std::vector<TokenStatement>& stmts, const std::set<std::string>& forbidden) {
    std::vector<TokenStatement> out = stmts;
    RenameTable table;
    std::set<std::string> def_names;  // entry-function names, never renamed

    size_t counter = 0;
    for (auto& stmt : out) {
        bool prev_was_def = false;
        for (auto& t : stmt.tokens) {
            bool after_def = prev_was_def;
            prev_was_def = (t == "def");
            if (!is_name_token(t)) continue;
            if (after_def) {
                def_names.insert(t);
                continue;
            }
            if (forbidden.count(t) || def_names.count(t)) continue;
            auto it = table.forward.find(t);
            if (it == table.forward.end()) {
                std::string fresh = "x" + std::to_string(counter++);
                it = table.forward.emplace(t, fresh).first;
                table.inverse.emplace(fresh, t);
            }
            t = it->second;
        }
    }
    return {std::move(out), std::move(table)};
}

std::string restore(const std::vector<TokenStatement>& stmts, const RenameTable& table) {
    std::vector<TokenStatement> out;
    out.reserve(stmts.size());
    for (const auto& stmt : stmts) {
        if (stmt.is_marker()) continue;
        TokenStatement r = stmt;
        for (auto& t : r.tokens) {
            auto it = table.inverse.find(t);
            if (it != table.inverse.end()) {
                t = it->second;
                continue;
            }
            // Model-invented x_j: keep it unless it collides with an
            // original name; then append underscores until it is fresh.
            if (t.size() >= 2 && t[0] == 'x' &&
                std::all_of(t.begin() + 1, t.end(), [](char c) { return is_digit(c); })) {
                std::string fresh = t;
                while (table.forward.count(fresh)) fresh += '_';
                t = fresh;
            }
        }
        out.push_back(std::move(r));
    }
    return detokenize_program(out);
}

std::string rename_source(const std::string& source, const std::set<std::string>& forbidden,
                          RenameTable* table_out) {
    auto stmts = tokenize(source);
    auto [renamed, table] = rename(stmts, forbidden);
    if (table_out) *table_out = table;
    return detokenize_program(renamed);
}

std::vector<std::pair<std::string, long>> name_frequencies(
    const std::vector<std::string>& sources) {
    std::map<std::string, long> counts;
    for (const auto& src : sources) {
        bool prev_was_def = false;
        for (const auto& stmt : tokenize(src)) {
            for (const auto& t : stmt.tokens) {
                bool after_def = prev_was_def;
                prev_was_def = (t == "def");
                if (!is_name_token(t) || after_def) continue;
                ++counts[t];
            }
        }
    }
    std::vector<std::pair<std::string, long>> out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

std::set<std::string> learn_forbidden_list(
    const std::vector<std::string>& correct_programs,
    const std::function<bool(const std::string&)>& is_correct,
    const ForbiddenLearnConfig& cfg) {
    if (correct_programs.empty()) throw std::runtime_error("EmptyCorpus: no correct programs");
    if (!is_correct) throw std::runtime_error("CheckerUnavailable");

    const auto freqs = name_frequencies(correct_programs);
    const double target = cfg.keep_fraction * static_cast<double>(correct_programs.size());

    std::set<std::string> forbidden;
    auto count_correct = [&]() {
        long n = 0;
        for (const auto& src : correct_programs)
            if (is_correct(rename_source(src, forbidden))) ++n;
        return n;
    };

    // Growth phase: most frequent names first until enough programs survive.
    long correct_now = count_correct();
    size_t next = 0;
    while (static_cast<double>(correct_now) < target && next < freqs.size()) {
        forbidden.insert(freqs[next].first);
        ++next;
        correct_now = count_correct();
    }

    // Reduction phase: ascending frequency; drop entries that cost nothing.
    for (auto it = freqs.rbegin(); it != freqs.rend(); ++it) {
        if (!forbidden.count(it->first)) continue;
        forbidden.erase(it->first);
        long without = count_correct();
        if (without < correct_now) {
            forbidden.insert(it->first);
        } else {
            correct_now = without;
        }
    }
    return forbidden;
}

}  // namespace skp
