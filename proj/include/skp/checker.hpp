#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace skp {

// Bad setup (paths, backend names, missing interpreter); the CLI maps this
// to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class FailureKind { none, syntactic, semantic, timeout, crash };

std::string failure_kind_name(FailureKind k);

struct Verdict {
    bool pass = false;
    FailureKind kind = FailureKind::none;

    static Verdict ok() { return {true, FailureKind::none}; }
    static Verdict fail(FailureKind k) { return {false, k}; }
};

struct TestSuite {
    std::string function;
    nlohmann::json tests;  // array of {"args": [...], "expected": ...}
    int timeout_ms = 2000;

    static TestSuite load(const std::string& path);
    static TestSuite from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Runs candidate programs against the suite in an isolated interpreter
// process. A persistent harness worker forks one child per candidate, so
// every check still runs in a fresh process but without interpreter startup
// cost. Verdicts are cached by source text (same source + suite always gives
// the same verdict).
//
// Child exit-code convention: 0 pass, 1 semantic fail, 2 syntactic fail,
// 124 timeout.
class Checker {
public:
    // Spawns the worker and handshakes with it, so a missing or broken
    // interpreter fails construction (ConfigError) rather than individual
    // candidate checks.
    Checker(std::string interpreter, TestSuite suite);
    ~Checker();

    Checker(const Checker&) = delete;
    Checker& operator=(const Checker&) = delete;

    Verdict check(const std::string& source);

    const TestSuite& suite() const { return suite_; }

    // Subprocess round-trips actually performed (cache misses).
    long invocations() const { return invocations_; }
    // Total check() calls, cache hits included.
    long checks() const { return checks_; }

private:
    struct Worker;
    void ensure_worker();
    Verdict check_uncached(const std::string& source);

    std::string interpreter_;
    TestSuite suite_;
    std::unique_ptr<Worker> worker_;
    std::map<std::string, Verdict> cache_;
    long invocations_ = 0;
    long checks_ = 0;
};

// One-shot variant spawning a fresh interpreter; exercises the harness
// exit-code convention directly.
Verdict check_once(const std::string& interpreter, const TestSuite& suite,
                   const std::string& source);

// Classification of a successful repair.
struct RepairClassification {
    FailureKind fixed_kind = FailureKind::semantic;  // syntactic or semantic
    bool fresh = false;
};

// fixed_kind reflects what was wrong with the *original* program; fresh means
// the corrected program (renamed, canonical whitespace) is not among the
// training programs.
RepairClassification classify(const Verdict& original,
                              const std::string& corrected_canonical,
                              const std::vector<std::string>& training_index_sorted);

}  // namespace skp
