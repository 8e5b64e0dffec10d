"""``qcert`` command line: run verification suites over parameter ranges.

Exit codes: 0 when every check passes, 1 when any check fails, is ill-posed
or errors (or the report cannot be written), 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__, congruence
from .dsl import DSLError, congruence_eval, evaluate, parse, parse_binding

DEFAULT_RANGES = {
    "identity": "1..20",
    "identity-param": "2..8",
    "induction": "1..50",
    "congruence": "3..15",
    "lemmas": "3..15",
    "classical": "1..30",
}

FORMULAS = {
    "identity": "sum_{k=0}^{n-1} [4k-1]_{q^2}[4k-1]^2 (q^-2;q^4)_k^4/(q^4;q^4)_k^4 q^{4k}"
                " = (q^{2n}+1)^4 [n]_{q^2}^4 (q^-2;q^4)_n^4/(q^4;q^4)_n^4 f_n(q)",
    "identity-param": "parametric sum_{k=0}^{n-1} = closed form with f_n(a,q); a=1 recovers the n-th identity",
    "induction": "(1-q^{4n})^4 f_n + (1-q^{2(4n-1)})(1-q^{4n-1})^2(1-q)(1+q)^3 q^{4n} = (1-q^{4n-2})^4 f_{n+1}",
    "classical": "sum_{k=0}^{n-1} (4k-1)^3 C(2k,k)^4/(256^k (2k-1)^4) = 16n^4(8n^2-12n+3)C(2n,n)^4/(256^n(2n-1)^4)",
}

MODULUS_TEXT = {
    "refined": "sum_S(M) == (2q+2q^-1-1)[n]_{q^2}^4  mod  [n]_{q^2}^4 Phi_n(q^2)",
    "weak": "sum_S(M) == 0  mod  [n]_{q^2} Phi_n(q^2)^3",
    "param": "parametric sum_S(M) == 0  mod  [n]_{q^2}^2 (1-a q^{2n})(a-q^{2n})",
    "corollary": "classical_sum(M) == 3p^{4r}  mod  p^{4r+1}",
    "lemmas": "mod Phi_n(q^2): poch ratio == (-1)^{(n+1)/2} q^{(n-1)^2/2-2}; [2n,n]_{q^2} == 2; (-q^2;q^2)_n == 2",
}


@dataclass
class RunConfig:
    command: str
    n_range: list[int] = field(default_factory=list)
    M_choice: str = "both"
    family: str = "refined"
    p_list: list[int] = field(default_factory=list)
    r_list: list[int] = field(default_factory=list)
    expr: str | None = None
    rhs: str | None = None
    modulus: str | None = None
    bind: str = ""
    json_path: str | None = None
    jobs: int = 1
    timing: bool = True


@dataclass
class CheckReport:
    check_id: str
    params: dict
    status: str
    residual_summary: str
    degrees: list
    elapsed_ms: int


@dataclass(frozen=True)
class Task:
    check_id: str
    func: str
    args: tuple
    params: tuple


class UsageError(Exception):
    pass


def parse_int_list(text: str) -> list[int]:
    """``"3,5..9"`` -> ``[3, 5, 6, 7, 8, 9]``; ranges are inclusive."""
    out: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        lo, sep, hi = part.partition("..")
        try:
            a = int(lo)
            b = int(hi) if sep else a
        except ValueError:
            raise UsageError(f"bad integer or range {part!r}") from None
        if b < a:
            raise UsageError(f"empty range {part!r}")
        out.extend(range(a, b + 1))
    if not out:
        raise UsageError("empty integer list")
    return out


def _check_id(command: str, family: str = "", **params) -> str:
    bits = [command]
    if family:
        bits.append(family)
    for key in ("n", "k", "p", "r", "M"):
        if key in params:
            val = params[key]
            bits.append(f"{key}={val:03d}" if isinstance(val, int) else f"{key}={val}")
    return "/".join(bits)


def _m_choices(choice: str) -> list[str]:
    return ["half", "full"] if choice == "both" else [choice]


def build_tasks(cfg: RunConfig) -> tuple[list[Task], list[str]]:
    tasks: list[Task] = []
    notes: list[str] = []

    def add(func, args, command, family="", **params):
        cid = _check_id(command, family, **params)
        tasks.append(Task(cid, func, tuple(args), tuple(sorted(params.items()))))

    odd_only = []
    if cfg.command == "identity":
        for n in cfg.n_range:
            if n < 1:
                raise UsageError("identity needs n >= 1")
            add("verify_identity", (n,), "identity", n=n)
    elif cfg.command == "identity-param":
        for n in cfg.n_range:
            if n < 2:
                raise UsageError("identity-param needs n >= 2")
            add("verify_identity_param", (n,), "identity-param", n=n)
    elif cfg.command == "induction":
        for n in cfg.n_range:
            if n < 1:
                raise UsageError("induction needs n >= 1")
            add("verify_induction", (n,), "induction", n=n)
    elif cfg.command == "classical":
        for n in cfg.n_range:
            if n < 1:
                raise UsageError("classical needs n >= 1")
            add("verify_classical", (n,), "classical", "identity", n=n)
            add("verify_limit", (n,), "classical", "limit", k=n)
    elif cfg.command == "congruence":
        func = {"refined": "verify_refined", "weak": "verify_weak", "param": "verify_param"}[cfg.family]
        for n in cfg.n_range:
            if n % 2 == 0 or n < 3:
                odd_only.append(n)
                continue
            for choice in _m_choices(cfg.M_choice):
                add(func, (n, choice), "congruence", cfg.family, n=n, M=choice)
    elif cfg.command == "lemmas":
        for n in cfg.n_range:
            if n >= 1:
                add("verify_restated", (n,), "lemmas", "restated", n=n)
            if n % 2 == 0 or n < 3:
                odd_only.append(n)
                continue
            for name in ("lemma_poch_ratio", "qbinom_central", "minus_poch", "halfcase", "halfcase_param"):
                add(f"verify_{name}", (n,), "lemmas", name, n=n)
        top = max(cfg.n_range)
        add("gcd_facts", (top, top), "lemmas", "gcd_facts", n=top)
    elif cfg.command == "corollary":
        for p in cfg.p_list:
            if p % 2 == 0 or not congruence.is_prime(p):
                raise UsageError(f"p={p} is not an odd prime")
            for r in cfg.r_list:
                if r < 1:
                    raise UsageError("r must be >= 1")
                for choice in _m_choices(cfg.M_choice):
                    add("verify_corollary", (p, r, choice), "corollary", p=p, r=r, M=choice)
    else:
        raise UsageError(f"unknown command {cfg.command!r}")
    if odd_only:
        notes.append("skipped (odd n > 1 only): n = " + ", ".join(map(str, odd_only)))
    return tasks, notes


def run_task(task: Task) -> CheckReport:
    start = time.perf_counter()
    try:
        verdict = getattr(congruence, task.func)(*task.args)
        status = verdict.status
        summary = verdict.notes
        if verdict.residual_degree_span is not None:
            summary = f"{summary}; residual span {list(verdict.residual_degree_span)}".lstrip("; ")
        degrees = list(verdict.degrees)
        if verdict.quotient_degree is not None:
            degrees = degrees + [verdict.quotient_degree]
    except Exception as exc:  # reported per check, never fatal to the run
        status, summary, degrees = "error", f"{type(exc).__name__}: {exc}", []
    elapsed = int(round((time.perf_counter() - start) * 1000))
    return CheckReport(task.check_id, dict(task.params), status, summary, degrees, elapsed)


def max_jobs(requested: int) -> int:
    cap = os.environ.get("QCERT_MAX_JOBS")
    jobs = max(1, requested)
    if cap:
        try:
            jobs = min(jobs, max(1, int(cap)))
        except ValueError:
            pass
    return jobs


def execute(tasks: list[Task], jobs: int = 1) -> list[CheckReport]:
    jobs = max_jobs(jobs)
    if jobs == 1 or len(tasks) <= 1:
        reports = [run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run_task, tasks))
    return sorted(reports, key=lambda r: r.check_id)


def summarize(reports: list[CheckReport]) -> dict[str, int]:
    summary = {"pass": 0, "fail": 0, "ill_posed": 0, "error": 0}
    for r in reports:
        summary[r.status.replace("-", "_")] += 1
    return summary


def report_document(reports: list[CheckReport], timing: bool = True) -> str:
    checks = []
    for r in sorted(reports, key=lambda r: r.check_id):
        d = asdict(r)
        if not timing:
            d["elapsed_ms"] = 0
        checks.append(d)
    doc = {"tool_version": __version__, "checks": checks, "summary": summarize(reports)}
    return json.dumps(doc, indent=2) + "\n"


def emit_report(reports: list[CheckReport], path: str, timing: bool = True) -> None:
    text = report_document(reports, timing)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError:
        if os.path.exists(path):
            os.remove(path)
        raise


def _print_table(reports: list[CheckReport], out) -> None:
    width = max((len(r.check_id) for r in reports), default=8)
    for r in reports:
        print(f"{r.status:<10} {r.check_id:<{width}} {r.elapsed_ms:>7} ms  {r.residual_summary}", file=out)


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if cfg.command == "eval":
        return _run_eval(cfg, out)
    tasks, notes = build_tasks(cfg)
    header = MODULUS_TEXT.get(cfg.family) if cfg.command == "congruence" else \
        MODULUS_TEXT.get(cfg.command, FORMULAS.get(cfg.command, ""))
    print(f"# {cfg.command}: {header}", file=out)
    for note in notes:
        print(f"# {note}", file=out)
    reports = execute(tasks, cfg.jobs)
    _print_table(reports, out)
    summary = summarize(reports)
    print(f"# summary: {summary}", file=out)
    if cfg.json_path:
        try:
            emit_report(reports, cfg.json_path, cfg.timing)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 1
    return 0 if summary["pass"] == len(reports) else 1


def _run_eval(cfg: RunConfig, out) -> int:
    if not cfg.expr:
        raise UsageError("eval needs --expr")
    binding = parse_binding(cfg.bind)
    reports: list[CheckReport] = []
    if cfg.rhs is None and cfg.modulus is None:
        value = evaluate(parse(cfg.expr), binding)
        print(value, file=out)
    else:
        if cfg.rhs is None or cfg.modulus is None:
            raise UsageError("a congruence needs both --rhs and --mod")
        print(f"# eval: {cfg.expr} == {cfg.rhs}  mod  {cfg.modulus}", file=out)
        start = time.perf_counter()
        verdict = congruence_eval(parse(cfg.expr), parse(cfg.rhs), parse(cfg.modulus), binding)
        elapsed = int(round((time.perf_counter() - start) * 1000))
        reports.append(CheckReport("eval/congruence", binding, verdict.status, verdict.notes,
                                   [verdict.quotient_degree] if verdict.quotient_degree is not None else [],
                                   elapsed))
        _print_table(reports, out)
    if cfg.json_path:
        try:
            emit_report(reports, cfg.json_path, cfg.timing)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 1
    return 0 if all(r.status == "pass" for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcert", description="Exact certification of q-series identities and q-congruences")
    parser.add_argument("--version", action="version", version=f"qcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", dest="json_path", help="write a JSON report to this path")
        p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
        p.add_argument("--no-timing", action="store_true",
                       help="write elapsed_ms as 0 so reports are byte-reproducible")

    for name in ("identity", "identity-param", "induction", "classical", "lemmas"):
        p = sub.add_parser(name)
        p.add_argument("--n", default=DEFAULT_RANGES[name], help="inclusive range a..b or list")
        common(p)

    p = sub.add_parser("congruence")
    p.add_argument("--family", choices=("refined", "weak", "param"), default="refined")
    p.add_argument("--n", default=DEFAULT_RANGES["congruence"])
    p.add_argument("--M", dest="M_choice", choices=("half", "full", "both"), default="both")
    common(p)

    p = sub.add_parser("corollary")
    p.add_argument("--p", dest="p_list", default="3,5,7")
    p.add_argument("--r", dest="r_list", default="1")
    p.add_argument("--M", dest="M_choice", choices=("half", "full", "both"), default="both")
    common(p)

    p = sub.add_parser("eval")
    p.add_argument("--expr", required=True, help="expression (left-hand side for a congruence)")
    p.add_argument("--rhs", help="right-hand side of a congruence")
    p.add_argument("--mod", dest="modulus", help="modulus of a congruence")
    p.add_argument("--bind", default="", help="integer bindings, e.g. n=3,M=2")
    common(p)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, json_path=ns.json_path, jobs=ns.jobs, timing=not ns.no_timing)
    if hasattr(ns, "n"):
        cfg.n_range = parse_int_list(ns.n)
    if hasattr(ns, "M_choice"):
        cfg.M_choice = ns.M_choice
    if hasattr(ns, "family"):
        cfg.family = ns.family
    if hasattr(ns, "p_list"):
        cfg.p_list = parse_int_list(ns.p_list)
        cfg.r_list = parse_int_list(ns.r_list)
    if ns.command == "eval":
        cfg.expr, cfg.rhs, cfg.modulus, cfg.bind = ns.expr, ns.rhs, ns.modulus, ns.bind
    if cfg.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except (UsageError, DSLError) as exc:
        print(f"qcert: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
