# Test harness for candidate programs.
#
# Single-shot mode: reads one JSON task {"source", "function", "tests",
# "timeout_ms"} from stdin, runs it in a forked child and exits with the
# child's code: 0 pass, 1 semantic fail, 2 syntactic fail, 124 timeout.
#
# Serve mode (--serve): reads one task per line, answers one JSON line
# {"status": "pass"|"semantic"|"syntactic"|"timeout"|"crash"} per task. Each
# candidate still runs in its own forked process; the parent never executes
# candidate code.

import copy
import json
import os
import resource
import signal
import sys
import time

ABS_TOL = 1e-9
REL_TOL = 1e-6
MEM_LIMIT_BYTES = 512 * 1024 * 1024


def canon(v):
    if isinstance(v, tuple):
        return [canon(x) for x in v]
    if isinstance(v, list):
        return [canon(x) for x in v]
    if isinstance(v, dict):
        return {k: canon(x) for k, x in v.items()}
    return v


def deep_eq(a, b):
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return abs(a - b) <= max(ABS_TOL, REL_TOL * max(abs(a), abs(b)))
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(deep_eq(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return set(a.keys()) == set(b.keys()) and all(deep_eq(a[k], b[k]) for k in a)
    return type(a) == type(b) and a == b


def run_tests(source, function, tests):
    try:
        code = compile(source, "<candidate>", "exec")
    except SyntaxError:
        return 2
    except (ValueError, TypeError, RecursionError, MemoryError):
        return 2
    namespace = {"__name__": "__candidate__"}
    try:
        exec(code, namespace)
    except BaseException:
        return 1
    fn = namespace.get(function)
    if not callable(fn):
        return 1
    for t in tests:
        try:
            out = fn(*copy.deepcopy(t["args"]))
        except BaseException:
            return 1
        if not deep_eq(canon(out), canon(t["expected"])):
            return 1
    return 0


def run_in_child(task):
    """Fork, run the tests in the child, enforce the timeout. Returns a status string."""
    timeout_s = task.get("timeout_ms", 2000) / 1000.0
    pid = os.fork()
    if pid == 0:
        try:
            os.setsid()
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, 1)
            os.dup2(devnull, 2)
            cpu = max(1, int(timeout_s) + 1)
            resource.setrlimit(resource.RLIMIT_CPU, (cpu, cpu + 1))
            resource.setrlimit(resource.RLIMIT_AS, (MEM_LIMIT_BYTES, MEM_LIMIT_BYTES))
            rc = run_tests(task["source"], task["function"], task["tests"])
        except BaseException:
            rc = 1
        os._exit(rc)

    deadline = time.monotonic() + timeout_s
    while True:
        done, status = os.waitpid(pid, os.WNOHANG)
        if done == pid:
            break
        if time.monotonic() > deadline:
            try:
                os.killpg(pid, signal.SIGKILL)
            except OSError:
                os.kill(pid, signal.SIGKILL)
            os.waitpid(pid, 0)
            return "timeout"
        time.sleep(0.0005)

    if os.WIFEXITED(status):
        rc = os.WEXITSTATUS(status)
        if rc == 0:
            return "pass"
        if rc == 2:
            return "syntactic"
        if rc == 124:
            return "timeout"
        if rc == 1:
            return "semantic"
        return "crash"
    if os.WIFSIGNALED(status) and os.WTERMSIG(status) == signal.SIGXCPU:
        return "timeout"
    return "crash"


EXIT_CODES = {"pass": 0, "semantic": 1, "syntactic": 2, "timeout": 124, "crash": 3}


def main():
    if len(sys.argv) > 1 and sys.argv[1] == "--serve":
        for line in sys.stdin:
            line = line.strip()
            if not line:
                continue
            try:
                task = json.loads(line)
                status = run_in_child(task)
            except Exception:
                status = "crash"
            sys.stdout.write(json.dumps({"status": status}) + "\n")
            sys.stdout.flush()
    else:
        task = json.loads(sys.stdin.read())
        status = run_in_child(task)
        sys.exit(EXIT_CODES[status])


if __name__ == "__main__":
    main()
