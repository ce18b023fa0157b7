#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>

#include "skp/checker.hpp"

using namespace skp;
using nlohmann::json;

namespace {

TestSuite polysuite() {
    TestSuite s;
    s.function = "evaluatePoly";
    s.tests = json::array({
        json{{"args", json::array({json::array(), 2.0})}, {"expected", 0.0}},
        json{{"args", json::array({json::array({1.0, 2.0, 3.0}), 2.0})}, {"expected", 17.0}},
        json{{"args", json::array({json::array({2.0, -1.0}), 3.0})}, {"expected", -1.0}},
    });
    s.timeout_ms = 1500;
    return s;
}

const char* kCorrect =
    "def evaluatePoly(poly, x):\n"
    "  a = 0\n"
    "  f = 0.0\n"
    "  while a < len(poly):\n"
    "    f = poly[a]*x**a+f\n"
    "    a += 1\n"
    "  return f\n";

const char* kOffByOne =
    "def evaluatePoly(poly, x):\n"
    "  a = 0\n"
    "  f = 0.0\n"
    "  for a in range(0,len(poly) - 1):\n"
    "    f = poly[a]*x**a+f\n"
    "    a += 1\n"
    "  return f\n";

}  // namespace

TEST_CASE("correct program passes the suite") {
    Checker checker("python3", polysuite());
    auto v = checker.check(kCorrect);
    CHECK(v.pass);
    CHECK(v.kind == FailureKind::none);
}

TEST_CASE("parse failure is syntactic") {
    Checker checker("python3", polysuite());
    auto v = checker.check("def f(:\n");
    CHECK_FALSE(v.pass);
    CHECK(v.kind == FailureKind::syntactic);
}

TEST_CASE("off-by-one loop bound is semantic") {
    Checker checker("python3", polysuite());
    auto v = checker.check(kOffByOne);
    CHECK_FALSE(v.pass);
    CHECK(v.kind == FailureKind::semantic);
}

TEST_CASE("missing entry function is semantic") {
    Checker checker("python3", polysuite());
    auto v = checker.check("def other(a):\n  return a\n");
    CHECK_FALSE(v.pass);
    CHECK(v.kind == FailureKind::semantic);
}

TEST_CASE("infinite loop times out without blocking the search") {
    TestSuite s = polysuite();
    s.timeout_ms = 300;
    Checker checker("python3", s);
    const auto t0 = std::chrono::steady_clock::now();
    auto v = checker.check(
        "def evaluatePoly(poly, x):\n"
        "  while True:\n"
        "    pass\n");
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK_FALSE(v.pass);
    CHECK(v.kind == FailureKind::timeout);
    CHECK(sec < 5.0);
}

TEST_CASE("stdout noise from candidates does not corrupt the protocol") {
    Checker checker("python3", polysuite());
    auto v = checker.check(
        "def evaluatePoly(poly, x):\n"
        "  print('hello')\n"
        "  a = 0\n"
        "  f = 0.0\n"
        "  while a < len(poly):\n"
        "    f = poly[a]*x**a+f\n"
        "    a += 1\n"
        "  return f\n");
    CHECK(v.pass);
    CHECK(checker.check(kCorrect).pass);
}

TEST_CASE("same source gives the same verdict and is cached") {
    Checker checker("python3", polysuite());
    auto v1 = checker.check(kOffByOne);
    auto v2 = checker.check(kOffByOne);
    CHECK(v1.pass == v2.pass);
    CHECK(v1.kind == v2.kind);
    CHECK(checker.checks() == 2);
    CHECK(checker.invocations() == 1);
}

TEST_CASE("one-shot harness follows the exit-code convention") {
    CHECK(check_once("python3", polysuite(), kCorrect).pass);
    CHECK(check_once("python3", polysuite(), "def f(:\n").kind == FailureKind::syntactic);
    CHECK(check_once("python3", polysuite(), kOffByOne).kind == FailureKind::semantic);
    TestSuite s = polysuite();
    s.timeout_ms = 300;
    CHECK(check_once("python3", s, "while True:\n  pass\n").kind == FailureKind::timeout);
}

TEST_CASE("float comparison uses relative tolerance") {
    TestSuite s;
    s.function = "f";
    s.tests = json::array({json{{"args", json::array()}, {"expected", 1.0}}});
    Checker checker("python3", s);
    CHECK(checker.check("def f():\n  return 1.0 + 1e-9\n").pass);
    CHECK_FALSE(checker.check("def f():\n  return 1.001\n").pass);
    // tuples compare like lists (JSON cannot express tuples)
    TestSuite t;
    t.function = "g";
    t.tests = json::array({json{{"args", json::array()}, {"expected", json::array({1, 2})}}});
    Checker checker2("python3", t);
    CHECK(checker2.check("def g():\n  return (1, 2)\n").pass);
}

TEST_CASE("missing interpreter fails at construction, not per candidate") {
    CHECK_THROWS_AS(Checker("/nonexistent/python3", polysuite()), ConfigError);
}

TEST_CASE("classify reports kind of the original failure and freshness") {
    std::vector<std::string> index{"a = 1\n", "b = 2\n"};
    auto c1 = classify(Verdict::fail(FailureKind::syntactic), "c = 3\n", index);
    CHECK(c1.fixed_kind == FailureKind::syntactic);
    CHECK(c1.fresh);
    auto c2 = classify(Verdict::fail(FailureKind::semantic), "a = 1\n", index);
    CHECK(c2.fixed_kind == FailureKind::semantic);
    CHECK_FALSE(c2.fresh);
    auto c3 = classify(Verdict::fail(FailureKind::timeout), "z\n", index);
    CHECK(c3.fixed_kind == FailureKind::semantic);
}
