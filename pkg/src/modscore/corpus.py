"""Corpus records and filtering.

Corpus files are JSON Lines, one problem per line:

    {"id": "p1", "description": "...", "difficulty": "introductory",
     "solutions": ["...", ...],
     "tests": [{"input": "...", "output": "..."}, ...]}

Filtering keeps only solutions that pass every test; problems with no
tests or no surviving solutions are dropped and reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusFormatError
from .sandbox import RunLimits, passes_all

NO_TESTS_REASON = "insufficient or absent test cases"
NO_SOLUTIONS_REASON = "no solutions passing test cases"


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # data record, not a pytest class

    input: bytes
    expected_output: bytes


@dataclass(eq=False)
class Problem:
    id: str
    description: str
    solutions: list[str]
    tests: list[TestCase]
    difficulty: str | None = None


def _require(row: dict, key: str, line_no: int):
    if key not in row:
        raise CorpusFormatError(f"line {line_no}: missing key {key!r}")
    return row[key]


def problem_from_row(row: dict, line_no: int = 0) -> Problem:
    if not isinstance(row, dict):
        raise CorpusFormatError(f"line {line_no}: expected an object")
    tests = []
    for t in row.get("tests", []):
        if not isinstance(t, dict) or "input" not in t or "output" not in t:
            raise CorpusFormatError(f"line {line_no}: test needs input/output")
        tests.append(
            TestCase(
                input=str(t["input"]).encode("utf-8"),
                expected_output=str(t["output"]).encode("utf-8"),
            )
        )
    solutions = _require(row, "solutions", line_no)
    if not isinstance(solutions, list) or not all(isinstance(s, str) for s in solutions):
        raise CorpusFormatError(f"line {line_no}: solutions must be a list of strings")
    return Problem(
        id=str(_require(row, "id", line_no)),
        description=str(row.get("description", "")),
        solutions=list(solutions),
        tests=tests,
        difficulty=row.get("difficulty"),
    )


def problem_to_row(problem: Problem) -> dict:
    return {
        "id": problem.id,
        "description": problem.description,
        "difficulty": problem.difficulty,
        "solutions": list(problem.solutions),
        "tests": [
            {
                "input": t.input.decode("utf-8"),
                "output": t.expected_output.decode("utf-8"),
            }
            for t in problem.tests
        ],
    }


def load_corpus(path: str | Path) -> list[Problem]:
    problems = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {line_no}: invalid JSON: {exc}") from exc
            problems.append(problem_from_row(row, line_no))
    return problems


def save_corpus(problems: list[Problem], path: str | Path):
    with open(path, "w", encoding="utf-8") as handle:
        for problem in problems:
            handle.write(json.dumps(problem_to_row(problem)) + "\n")


def load_generations(path: str | Path) -> dict[str, list[str]]:
    """Rows of {"id": ..., "generations": [program, ...]}."""
    table: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {line_no}: invalid JSON: {exc}") from exc
            if not isinstance(row, dict) or "id" not in row or "generations" not in row:
                raise CorpusFormatError(f"line {line_no}: need id and generations")
            gens = row["generations"]
            if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
                raise CorpusFormatError(f"line {line_no}: generations must be strings")
            table[str(row["id"])] = gens
    return table


@dataclass(eq=False)
class FilterReport:
    problems_before: int = 0
    problems_after: int = 0
    solutions_before: int = 0
    solutions_after: int = 0
    dropped: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "problems_before": self.problems_before,
            "problems_after": self.problems_after,
            "solutions_before": self.solutions_before,
            "solutions_after": self.solutions_after,
            "dropped": list(self.dropped),
        }


def filter_corpus(
    problems: list[Problem],
    limits: RunLimits,
    exact: bool = False,
    jobs: int = 0,
) -> tuple[list[Problem], FilterReport]:
    """Keep each problem's passing solutions; drop hopeless problems."""
    report = FilterReport(problems_before=len(problems))
    report.solutions_before = sum(len(p.solutions) for p in problems)

    def survivors(problem: Problem) -> list[str]:
        return [s for s in problem.solutions if passes_all(s, problem.tests, limits, exact)]

    kept: list[Problem] = []
    if jobs and jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            passing = list(
                pool.map(lambda p: survivors(p) if p.tests else [], problems)
            )
    else:
        passing = [survivors(p) if p.tests else [] for p in problems]

    for problem, good in zip(problems, passing):
        if not problem.tests:
            report.dropped.append({"id": problem.id, "reason": NO_TESTS_REASON})
            continue
        if not good:
            report.dropped.append({"id": problem.id, "reason": NO_SOLUTIONS_REASON})
            continue
        kept.append(
            Problem(
                id=problem.id,
                description=problem.description,
                solutions=good,
                tests=problem.tests,
                difficulty=problem.difficulty,
            )
        )
    report.problems_after = len(kept)
    report.solutions_after = sum(len(p.solutions) for p in kept)
    return kept, report
