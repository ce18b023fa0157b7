#include "skp/checker.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "skp/harness_embedded.hpp"

namespace skp {

using nlohmann::json;

std::string failure_kind_name(FailureKind k) {
    switch (k) {
        case FailureKind::none: return "none";
        case FailureKind::syntactic: return "syntactic";
        case FailureKind::semantic: return "semantic";
        case FailureKind::timeout: return "timeout";
        case FailureKind::crash: return "crash";
    }
    return "unknown";
}

TestSuite TestSuite::from_json(const json& j) {
    TestSuite s;
    s.function = j.at("function").get<std::string>();
    s.tests = j.at("tests");
    if (!s.tests.is_array()) throw std::runtime_error("test suite: \"tests\" must be an array");
    if (j.contains("timeout_ms")) s.timeout_ms = j["timeout_ms"].get<int>();
    return s;
}

TestSuite TestSuite::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open test suite: " + path);
    json j;
    in >> j;
    return from_json(j);
}

json TestSuite::to_json() const {
    return json{{"function", function}, {"tests", tests}, {"timeout_ms", timeout_ms}};
}

namespace {

std::string write_harness_file() {
    char tmpl[] = "/tmp/skp_harness_XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0) throw std::runtime_error("mkstemp failed for checker harness");
    const char* src = embedded_check_harness();
    size_t len = std::strlen(src);
    size_t off = 0;
    while (off < len) {
        ssize_t w = write(fd, src + off, len - off);
        if (w < 0) {
            close(fd);
            throw std::runtime_error("failed writing checker harness");
        }
        off += static_cast<size_t>(w);
    }
    close(fd);
    return tmpl;
}

Verdict status_to_verdict(const std::string& status) {
    if (status == "pass") return Verdict::ok();
    if (status == "syntactic") return Verdict::fail(FailureKind::syntactic);
    if (status == "semantic") return Verdict::fail(FailureKind::semantic);
    if (status == "timeout") return Verdict::fail(FailureKind::timeout);
    return Verdict::fail(FailureKind::crash);
}

}  // namespace

struct Checker::Worker {
    pid_t pid = -1;
    int to_child = -1;    // write end
    int from_child = -1;  // read end
    std::string harness_path;
    std::string read_buf;

    ~Worker() { stop(); }

    void start(const std::string& interpreter) {
        if (harness_path.empty()) harness_path = write_harness_file();
        signal(SIGPIPE, SIG_IGN);

        int in_pipe[2], out_pipe[2];
        if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
            throw std::runtime_error("pipe() failed for checker worker");

        pid = fork();
        if (pid < 0) throw std::runtime_error("fork() failed for checker worker");
        if (pid == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            close(in_pipe[0]);
            close(in_pipe[1]);
            close(out_pipe[0]);
            close(out_pipe[1]);
            execlp(interpreter.c_str(), interpreter.c_str(), harness_path.c_str(), "--serve",
                   static_cast<char*>(nullptr));
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        to_child = in_pipe[1];
        from_child = out_pipe[0];
        read_buf.clear();
    }

    void stop() {
        if (to_child >= 0) close(to_child);
        if (from_child >= 0) close(from_child);
        to_child = from_child = -1;
        if (pid > 0) {
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            pid = -1;
        }
        if (!harness_path.empty()) {
            unlink(harness_path.c_str());
            harness_path.clear();
        }
    }

    void kill_child_keep_harness() {
        if (to_child >= 0) close(to_child);
        if (from_child >= 0) close(from_child);
        to_child = from_child = -1;
        if (pid > 0) {
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            pid = -1;
        }
    }

    bool write_line(const std::string& line) {
        size_t off = 0;
        while (off < line.size()) {
            ssize_t w = write(to_child, line.data() + off, line.size() - off);
            if (w < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            off += static_cast<size_t>(w);
        }
        return true;
    }

    // Reads one line, or empty on timeout/EOF.
    std::string read_line(int timeout_ms) {
        while (true) {
            auto nl = read_buf.find('\n');
            if (nl != std::string::npos) {
                std::string line = read_buf.substr(0, nl);
                read_buf.erase(0, nl + 1);
                return line;
            }
            struct pollfd pfd{from_child, POLLIN, 0};
            int pr = poll(&pfd, 1, timeout_ms);
            if (pr <= 0) return "";
            char chunk[4096];
            ssize_t r = read(from_child, chunk, sizeof(chunk));
            if (r <= 0) return "";
            read_buf.append(chunk, static_cast<size_t>(r));
        }
    }
};

Checker::Checker(std::string interpreter, TestSuite suite)
    : interpreter_(std::move(interpreter)), suite_(std::move(suite)) {
    ensure_worker();
    json ping{{"source", ""}, {"function", "__ping__"}, {"tests", json::array()},
              {"timeout_ms", 2000}};
    if (!worker_->write_line(ping.dump() + "\n") || worker_->read_line(10000).empty()) {
        worker_->stop();
        throw ConfigError("checker interpreter unavailable: " + interpreter_);
    }
}

Checker::~Checker() = default;

void Checker::ensure_worker() {
    if (!worker_) worker_ = std::make_unique<Worker>();
    if (worker_->pid <= 0) worker_->start(interpreter_);
}

Verdict Checker::check_uncached(const std::string& source) {
    json task{{"source", source},
              {"function", suite_.function},
              {"tests", suite_.tests},
              {"timeout_ms", suite_.timeout_ms}};
    const std::string line = task.dump() + "\n";
    // The worker enforces the per-candidate timeout itself; the outer margin
    // only fires if the worker wedges.
    const int outer_ms = suite_.timeout_ms + 5000;

    for (int attempt = 0; attempt < 2; ++attempt) {
        ensure_worker();
        if (!worker_->write_line(line)) {
            worker_->kill_child_keep_harness();
            continue;
        }
        std::string reply = worker_->read_line(outer_ms);
        if (reply.empty()) {
            worker_->kill_child_keep_harness();
            continue;
        }
        try {
            json r = json::parse(reply);
            return status_to_verdict(r.at("status").get<std::string>());
        } catch (const std::exception&) {
            worker_->kill_child_keep_harness();
        }
    }
    return Verdict::fail(FailureKind::crash);
}

Verdict Checker::check(const std::string& source) {
    ++checks_;
    auto it = cache_.find(source);
    if (it != cache_.end()) return it->second;
    ++invocations_;
    Verdict v = check_uncached(source);
    cache_.emplace(source, v);
    return v;
}

Verdict check_once(const std::string& interpreter, const TestSuite& suite,
                   const std::string& source) {
    std::string harness = write_harness_file();
    int in_pipe[2];
    if (pipe(in_pipe) != 0) throw std::runtime_error("pipe() failed");
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        int devnull = open("/dev/null", O_WRONLY);
        if (devnull >= 0) dup2(devnull, STDOUT_FILENO);
        execlp(interpreter.c_str(), interpreter.c_str(), harness.c_str(),
               static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    json task{{"source", source},
              {"function", suite.function},
              {"tests", suite.tests},
              {"timeout_ms", suite.timeout_ms}};
    std::string payload = task.dump();
    size_t off = 0;
    while (off < payload.size()) {
        ssize_t w = write(in_pipe[1], payload.data() + off, payload.size() - off);
        if (w < 0) {
            if (errno == EINTR) continue;
            break;
        }
        off += static_cast<size_t>(w);
    }
    close(in_pipe[1]);
    int status = 0;
    waitpid(pid, &status, 0);
    unlink(harness.c_str());
    if (!WIFEXITED(status)) return Verdict::fail(FailureKind::crash);
    switch (WEXITSTATUS(status)) {
        case 0: return Verdict::ok();
        case 1: return Verdict::fail(FailureKind::semantic);
        case 2: return Verdict::fail(FailureKind::syntactic);
        case 124: return Verdict::fail(FailureKind::timeout);
        default: return Verdict::fail(FailureKind::crash);
    }
}

RepairClassification classify(const Verdict& original,
                              const std::string& corrected_canonical,
                              const std::vector<std::string>& training_index_sorted) {
    RepairClassification c;
    c.fixed_kind = original.kind == FailureKind::syntactic ? FailureKind::syntactic
                                                           : FailureKind::semantic;
    c.fresh = !std::binary_search(training_index_sorted.begin(), training_index_sorted.end(),
                                  corrected_canonical);
    return c;
}

}  // namespace skp
