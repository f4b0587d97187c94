"""Command-line entry point.

Subcommands compose the pipeline: analyze -> classify -> singularize ->
filter -> passk -> correlate -> ppl. Every JSON report embeds the tool
version and the effective configuration. Exit codes: 0 success, 1 usage,
2 malformed corpus, 3 transform unsupported, 4 sandbox unavailable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .corpus import (
    load_corpus,
    load_generations,
    filter_corpus,
    save_corpus,
)
from .errors import (
    CorpusFormatError,
    DynamicCallUnsupported,
    EncodingError,
    ExternalNameCollision,
    ModscoreError,
    RecursionUnsupported,
    SandboxUnavailable,
    TransformUnsupported,
)
from .inliner import inline_all, plan_inlining, verify_equivalence
from .modularity import DEFAULT_TAU, categorize_solutions, score_unit
from .parsing import parse
from .passk import EvalResult, aggregate
from .profiles import available_profiles, get_profile
from .sandbox import RunLimits, count_correct
from .stats import (
    DEFAULT_BINS,
    LogProbRecord,
    ScoredSample,
    binned_sample,
    pearson,
    perplexity,
    ppl_compare,
    spearman,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CORPUS = 2
EXIT_TRANSFORM = 3
EXIT_SANDBOX = 4

_TRANSFORM_ERRORS = (
    TransformUnsupported,
    RecursionUnsupported,
    DynamicCallUnsupported,
    ExternalNameCollision,
)


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is taken by corpus errors
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass
class RunConfig:
    profile: str = "py3"
    tau: int = DEFAULT_TAU
    seed: int = 0
    jobs: int = 0
    wall_time: float = 10.0
    memory: int = 512 * 1024 * 1024
    output_cap: int = 1024 * 1024
    exact_output: bool = False
    output_format: str = "json"

    def limits(self) -> RunLimits:
        return RunLimits(self.wall_time, self.memory, self.output_cap)

    def to_dict(self) -> dict:
        return {
            "profile": self.profile,
            "tau": self.tau,
            "seed": self.seed,
            "jobs": self.jobs,
            "limits": {
                "wall_time": self.wall_time,
                "memory": self.memory,
                "output_cap": self.output_cap,
            },
            "exact_output": self.exact_output,
            "output_format": self.output_format,
        }


def _effective_jobs(jobs: int) -> int:
    return jobs if jobs > 0 else (os.cpu_count() or 1)


def _build_config(args) -> RunConfig:
    config = RunConfig()
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as handle:
            for key, value in json.load(handle).items():
                if hasattr(config, key):
                    setattr(config, key, value)
    for key in (
        "profile", "tau", "seed", "jobs", "wall_time", "memory",
        "output_cap", "exact_output",
    ):
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)
    if getattr(args, "table", False):
        config.output_format = "table"
    if getattr(args, "json", False):
        config.output_format = "json"
    env_profile = os.environ.get("MODSCORE_PROFILE")
    if env_profile:
        config.profile = env_profile
    return config


def _report(payload: dict, config: RunConfig) -> dict:
    return {"version": __version__, "config": config.to_dict(), **payload}


def _emit(payload: dict, config: RunConfig):
    if config.output_format == "table":
        _print_table(payload)
    else:
        print(json.dumps(payload, indent=2))


def _print_table(payload: dict, indent: int = 0):
    pad = "  " * indent
    for key, value in payload.items():
        if key in ("version", "config"):
            continue
        if isinstance(value, dict):
            print(f"{pad}{key}:")
            _print_table(value, indent + 1)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{pad}{key}:")
            for item in value:
                line = "  ".join(f"{k}={v}" for k, v in item.items())
                print(f"{pad}  {line}")
        else:
            print(f"{pad}{key}: {value}")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_analyze(args) -> int:
    config = _build_config(args)
    profile = get_profile(config.profile)
    rows = []
    for path in args.files:
        with open(path, "rb") as handle:
            text = handle.read()
        unit = parse(text, profile, unit_id=path)
        report = score_unit(unit, tau=config.tau, profile=profile)
        comp = report.complexity
        rows.append({
            "id": path,
            "cc_total": comp.cc_total,
            "cc_avg": comp.cc_avg,
            "function_count": comp.function_count,
            "per_function": [
                {"name": fn.qualname, "cc": cc}
                for fn, cc in comp.per_function.items()
            ],
            "n": report.n,
            "m_star": report.m_star,
            "mos": report.mos,
        })
    _emit(_report({"units": rows}, config), config)
    return EXIT_OK


def _cmd_classify(args) -> int:
    config = _build_config(args)
    profile = get_profile(config.profile)
    problems = load_corpus(args.corpus)
    rows = []
    for problem in sorted(problems, key=lambda p: p.id):
        reports = []
        for i, solution in enumerate(problem.solutions):
            unit = parse(solution, profile, unit_id=f"{problem.id}[{i}]")
            reports.append(score_unit(unit, tau=config.tau, profile=profile))
        picks = categorize_solutions(reports)
        rows.append({
            "problem_id": problem.id,
            "mc_solution_index": picks.mc_index,
            "sc_solution_index": picks.sc_index,
            "mos_values": [r.mos for r in reports],
        })
    _emit(_report({"problems": rows}, config), config)
    return EXIT_OK


def _cmd_singularize(args) -> int:
    config = _build_config(args)
    profile = get_profile(config.profile)
    with open(args.file, "rb") as handle:
        text = handle.read()
    unit = parse(text, profile, unit_id=args.file)
    transformed = inline_all(unit, plan_inlining(unit))
    if args.verify:
        from .corpus import TestCase

        tests = []
        with open(args.verify, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                tests.append(TestCase(
                    input=str(row["input"]).encode(),
                    expected_output=str(row["output"]).encode(),
                ))
        if not verify_equivalence(unit, transformed, tests, config.limits(),
                                  exact=config.exact_output):
            print("verification failed: verdicts differ", file=sys.stderr)
            return EXIT_TRANSFORM
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(transformed.text)
    else:
        sys.stdout.write(transformed.text)
    return EXIT_OK


def _cmd_filter(args) -> int:
    config = _build_config(args)
    problems = load_corpus(args.corpus)
    kept, report = filter_corpus(
        problems,
        config.limits(),
        exact=config.exact_output,
        jobs=_effective_jobs(config.jobs),
    )
    kept.sort(key=lambda p: p.id)
    save_corpus(kept, args.out)
    payload = _report({"filter": report.to_dict()}, config)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
    _emit(payload, config)
    return EXIT_OK


def _cmd_passk(args) -> int:
    config = _build_config(args)
    problems = {p.id: p for p in load_corpus(args.corpus)}
    generations = load_generations(args.gens)
    ks = sorted({int(k) for k in args.k.split(",")})
    results = []
    skipped = []
    for pid in sorted(problems):
        problem = problems[pid]
        gens = generations.get(pid)
        if gens is None:
            skipped.append({"id": pid, "reason": "no generations"})
            continue
        if not problem.tests:
            skipped.append({"id": pid, "reason": "no tests"})
            continue
        if args.n is not None and len(gens) != args.n:
            raise CorpusFormatError(
                f"problem {pid}: expected n={args.n} generations, got {len(gens)}"
            )
        c = count_correct(
            gens, problem.tests, config.limits(),
            exact=config.exact_output, jobs=_effective_jobs(config.jobs),
        )
        results.append(EvalResult.from_counts(pid, len(gens), c, ks))
    rows = [
        {
            "problem_id": r.problem_id,
            "n": r.n_samples,
            "c": r.c_correct,
            "pass_at": {str(k): v for k, v in sorted(r.pass_at.items())},
        }
        for r in results
    ]
    summary = {str(k): aggregate(results, k) for k in ks} if results else {}
    payload = _report(
        {"problems": rows, "aggregate": summary, "skipped": skipped}, config
    )
    _emit(payload, config)
    return EXIT_OK


def _cmd_correlate(args) -> int:
    config = _build_config(args)
    samples = []
    with open(args.scored, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                samples.append(ScoredSample(
                    unit_id=str(row["unit_id"]),
                    mos=float(row["mos"]),
                    pass1=float(row["pass1"]),
                ))
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise CorpusFormatError(f"line {line_no}: {exc}") from exc
    if args.per_bin:
        samples = binned_sample(samples, args.bins, args.per_bin, config.seed)
    xs = [s.mos for s in samples]
    ys = [s.pass1 for s in samples]
    r, rp = pearson(xs, ys, seed=config.seed)
    rho, rhop = spearman(xs, ys, seed=config.seed)
    payload = _report({
        "samples": len(samples),
        "pearson": {"r": r, "p": rp},
        "spearman": {"rho": rho, "p": rhop},
        "p_value_method": "two-sided permutation test, 10000 resamples",
    }, config)
    _emit(payload, config)
    return EXIT_OK


def _cmd_ppl(args) -> int:
    config = _build_config(args)
    records = []
    with open(args.logprobs, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                records.append(LogProbRecord(
                    id=str(row["id"]),
                    category=str(row["category"]),
                    token_logprobs=tuple(float(v) for v in row["token_logprobs"]),
                ))
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise CorpusFormatError(f"line {line_no}: {exc}") from exc
    summaries = ppl_compare(records)
    payload = _report({
        "records": [
            {"id": r.id, "category": r.category, "ppl": perplexity(r)}
            for r in records
        ],
        "by_category": {
            name: {"mean": s.mean, "std": s.std, "count": s.count}
            for name, s in summaries.items()
        },
        "std_kind": "population",
    }, config)
    _emit(payload, config)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def _add_common(sub):
    sub.add_argument("--profile", choices=available_profiles(), default=None)
    sub.add_argument("--tau", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--jobs", type=int, default=None)
    sub.add_argument("--wall-time", dest="wall_time", type=float, default=None)
    sub.add_argument("--memory", type=int, default=None)
    sub.add_argument("--output-cap", dest="output_cap", type=int, default=None)
    sub.add_argument("--exact-output", dest="exact_output",
                     action="store_const", const=True, default=None)
    sub.add_argument("--config", default=None, help="JSON config file; flags win")
    sub.add_argument("--json", action="store_true", help="JSON output (default)")
    sub.add_argument("--table", action="store_true", help="plain table output")


def build_parser() -> _Parser:
    parser = _Parser(prog="modscore", description=__doc__)
    parser.add_argument("--version", action="version", version=f"modscore {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("analyze", help="complexity and modularity per file")
    sub.add_argument("files", nargs="+")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_analyze)

    sub = commands.add_parser("classify", help="pick modular/singular solutions")
    sub.add_argument("corpus")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_classify)

    sub = commands.add_parser("singularize", help="inline every helper away")
    sub.add_argument("file")
    sub.add_argument("--verify", default=None, help="tests.jsonl to check behavior")
    sub.add_argument("--out", default=None)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_singularize)

    sub = commands.add_parser("filter", help="drop failing solutions from a corpus")
    sub.add_argument("corpus")
    sub.add_argument("--out", required=True)
    sub.add_argument("--report", default=None)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_filter)

    sub = commands.add_parser("passk", help="pass@k over external generations")
    sub.add_argument("corpus")
    sub.add_argument("--gens", required=True)
    sub.add_argument("--k", default="1")
    sub.add_argument("--n", type=int, default=None)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_passk)

    sub = commands.add_parser("correlate", help="score/performance correlations")
    sub.add_argument("scored")
    sub.add_argument("--bins", type=int, default=DEFAULT_BINS)
    sub.add_argument("--per-bin", dest="per_bin", type=int, default=None)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_correlate)

    sub = commands.add_parser("ppl", help="perplexity from token log-probs")
    sub.add_argument("logprobs")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_ppl)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except _TRANSFORM_ERRORS as exc:
        print(f"modscore: {exc}", file=sys.stderr)
        return EXIT_TRANSFORM
    except SandboxUnavailable as exc:
        print(f"modscore: sandbox unavailable: {exc}", file=sys.stderr)
        return EXIT_SANDBOX
    except (CorpusFormatError, EncodingError, FileNotFoundError, SyntaxError) as exc:
        print(f"modscore: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    except ModscoreError as exc:
        print(f"modscore: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
