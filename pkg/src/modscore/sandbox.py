"""Isolated execution of candidate programs against stdin/stdout tests.

Each run is a separate OS process: an isolated interpreter (-I), its own
process group (killed wholesale on timeout), CPU and address-space
rlimits, and stdout redirected to a size-capped file (RLIMIT_FSIZE turns
runaway output into a resource verdict instead of filling the disk).
Network isolation is left to the surrounding environment; the runner
interface is pluggable for anything stronger.
"""

from __future__ import annotations

import os
import signal
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import SandboxUnavailable

try:
    import resource
except ImportError:  # non-POSIX
    resource = None


@dataclass(frozen=True)
class RunLimits:
    wall_time: float = 10.0  # seconds
    memory: int = 512 * 1024 * 1024  # bytes
    output_cap: int = 1024 * 1024  # bytes

    def __post_init__(self):
        if self.wall_time <= 0 or self.memory <= 0 or self.output_cap <= 0:
            raise ValueError("all limits must be positive")


@dataclass(frozen=True)
class RunResult:
    verdict: str  # pass | wrong_output | timeout | runtime_error | resource_exceeded
    stdout: bytes
    duration: float
    detail: str = ""


def normalize_output(data: bytes) -> bytes:
    """Trailing whitespace per line and trailing blank lines are ignored."""
    lines = [line.rstrip() for line in data.split(b"\n")]
    while lines and lines[-1] == b"":
        lines.pop()
    return b"\n".join(lines)


def outputs_match(actual: bytes, expected: bytes, exact: bool = False) -> bool:
    if exact:
        return actual == expected
    return normalize_output(actual) == normalize_output(expected)


def _child_limits(limits: RunLimits):
    def apply():
        os.setsid()
        resource.setrlimit(resource.RLIMIT_AS, (limits.memory, limits.memory))
        cap = limits.output_cap
        resource.setrlimit(resource.RLIMIT_FSIZE, (cap, cap))
        cpu = max(1, int(limits.wall_time) + 1)
        resource.setrlimit(resource.RLIMIT_CPU, (cpu, cpu + 1))

    return apply


def run_program(code: str, stdin_data: bytes, limits: RunLimits) -> RunResult:
    """Execute one program once and classify the outcome."""
    if resource is None:
        raise SandboxUnavailable("resource limits unsupported on this platform")
    with tempfile.TemporaryDirectory(prefix="modscore-run-") as tmp:
        tmp_path = Path(tmp)
        (tmp_path / "prog.py").write_text(code, encoding="utf-8")
        (tmp_path / "stdin").write_bytes(stdin_data)
        out_path = tmp_path / "stdout"
        err_path = tmp_path / "stderr"
        start = time.monotonic()
        try:
            with open(tmp_path / "stdin", "rb") as fin, \
                    open(out_path, "wb") as fout, open(err_path, "wb") as ferr:
                proc = subprocess.Popen(
                    [sys.executable, "-I", "prog.py"],
                    stdin=fin,
                    stdout=fout,
                    stderr=ferr,
                    cwd=tmp,
                    preexec_fn=_child_limits(limits),
                )
        except OSError as exc:
            raise SandboxUnavailable(f"cannot spawn interpreter: {exc}") from exc
        timed_out = False
        try:
            returncode = proc.wait(timeout=limits.wall_time)
        except subprocess.TimeoutExpired:
            timed_out = True
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except ProcessLookupError:
                pass
            returncode = proc.wait()
        duration = time.monotonic() - start
        stdout = out_path.read_bytes()[: limits.output_cap]
        stderr = err_path.read_bytes()[:4096]

        if timed_out:
            return RunResult("timeout", stdout, duration)
        if returncode != 0:
            if returncode == -signal.SIGXFSZ or len(stdout) >= limits.output_cap:
                return RunResult("resource_exceeded", stdout, duration, "output cap")
            if returncode == -signal.SIGKILL or b"MemoryError" in stderr:
                return RunResult("resource_exceeded", stdout, duration, "memory")
            if returncode == -signal.SIGXCPU:
                return RunResult("timeout", stdout, duration, "cpu")
            return RunResult(
                "runtime_error", stdout, duration,
                stderr.decode("utf-8", "replace").strip().splitlines()[-1] if stderr else "",
            )
        return RunResult("completed", stdout, duration)


def run_solution(code: str, test, limits: RunLimits, exact: bool = False) -> RunResult:
    """Run one program on one test and judge its output."""
    result = run_program(code, test.input, limits)
    if result.verdict != "completed":
        return result
    if outputs_match(result.stdout, test.expected_output, exact=exact):
        return RunResult("pass", result.stdout, result.duration)
    return RunResult("wrong_output", result.stdout, result.duration)


def passes_all(code: str, tests, limits: RunLimits, exact: bool = False) -> bool:
    for test in tests:
        if run_solution(code, test, limits, exact=exact).verdict != "pass":
            return False
    return True


def count_correct(candidates, tests, limits: RunLimits, exact: bool = False, jobs: int = 0) -> int:
    """Number of candidates that pass every test."""
    if not tests:
        raise ValueError("tests must be non-empty")
    if jobs and jobs > 1 and len(candidates) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            flags = list(pool.map(lambda c: passes_all(c, tests, limits, exact), candidates))
        return sum(flags)
    return sum(passes_all(code, tests, limits, exact=exact) for code in candidates)
