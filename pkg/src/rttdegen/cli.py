"""verify: run a named verification suite and emit a JSON or markdown report.

    verify <suite> [--n N] [--case o|sp|both] [--rmax R] [--mmax M] [--order L]
                   [--jobs J] [--seed S] [--format json|md] [--out PATH]
                   [--config FILE] [--negative-control] [--timings]

Exit codes: 0 all pass, 1 some check failed, 2 inconclusive, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

from .report import FAIL, INCONCLUSIVE, PASS, CheckFailed, CheckRecord, Report

SCHEMA_VERSION = "1.0"
EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
CASES = {"o": ("o",), "sp": ("sp",), "both": ("o", "sp")}
POINTS = (Fraction(2), Fraction(-3, 5))


class UnknownSuite(ValueError):
    pass


class InvalidConfig(ValueError):
    pass


@dataclass
class SuiteConfig:
    n: int = 2
    case: str = "both"
    rmax: int = 4
    mmax: int = 2
    order: int = 6
    jobs: int = 1
    seed: int = 0
    relation_levels: int | None = None  # congruence search bound; None = max target level + 1
    negative_control: bool = False

    def validate(self) -> "SuiteConfig":
        if self.n < 1:
            raise InvalidConfig(f"N must be at least 1, got {self.n}")
        if self.case not in CASES:
            raise InvalidConfig(f"case must be one of {sorted(CASES)}, got {self.case!r}")
        if self.case == "sp" and self.n % 2:
            raise InvalidConfig("the symplectic case needs even N")
        if self.rmax < 0 or self.mmax < 0 or self.jobs < 1:
            raise InvalidConfig("rmax, mmax must be nonnegative and jobs positive")
        if self.relation_levels is not None and self.relation_levels < 0:
            raise InvalidConfig("relation_levels must be nonnegative")
        if self.order < self.rmax + 2:
            raise InvalidConfig(f"series order {self.order} must be at least rmax + 2 = {self.rmax + 2}")
        return self

    @property
    def bounds(self):
        from .filtration import CongruenceBounds

        return CongruenceBounds(relation_levels=self.relation_levels)

    @property
    def cases(self):
        cs = CASES[self.case]
        return tuple(c for c in cs if c == "o" or self.n % 2 == 0)


@dataclass(frozen=True)
class Task:
    name: str
    params: tuple
    target: str  # "module:function"
    args: tuple = ()
    kwargs: tuple = ()


def _task(name, fn, *args, params=None, **kwargs) -> Task:
    p = params if params is not None else {}
    return Task(name, tuple(p.items()), f"{fn.__module__}:{fn.__name__}", args, tuple(kwargs.items()))


def _resolve(target: str):
    import importlib

    mod, fn = target.split(":")
    return getattr(importlib.import_module(mod), fn)


def run_task(task: Task) -> list:
    from .filtration import IntegralityFailed, Refuted
    from .freealg import Certificate, Inconclusive, NotInSpan
    params = dict(task.params)
    t0 = time.perf_counter()
    try:
        out = _resolve(task.target)(*task.args, **dict(task.kwargs))
    except Inconclusive as exc:
        recs = [CheckRecord(task.name, params, INCONCLUSIVE, detail=str(exc))]
    except (CheckFailed, NotInSpan, Refuted, IntegralityFailed, AssertionError, ArithmeticError) as exc:
        detail = f"{type(exc).__name__}: {exc}"
        extra = getattr(exc, "detail", None) or getattr(exc, "witness", None)
        if isinstance(exc, NotInSpan):
            extra = exc.residual.format() if hasattr(exc, "residual") else None
        if extra:
            detail += f" [{extra}]"
        recs = [CheckRecord(task.name, params, FAIL, detail=detail)]
    else:
        if isinstance(out, Report):
            recs = []
            for c in out.checks:
                recs.append(CheckRecord(f"{task.name}/{c.name}", {**params, **c.params}, c.verdict,
                                        certificate=c.certificate, detail=c.detail, method=c.method))
        elif isinstance(out, Certificate):
            recs = [CheckRecord(task.name, params, PASS, certificate=out.to_json(), method="certificate")]
        elif out is True:
            recs = [CheckRecord(task.name, params, PASS)]
        else:
            recs = [CheckRecord(task.name, params, FAIL, detail=f"check returned {out!r}")]
    dt = time.perf_counter() - t0
    for r in recs:
        r.wall_time = dt / len(recs)
    return recs


# ---------------------------------------------------------------------------
# suites


def _quads(N):
    rng = range(1, N + 1)
    return [(i, j, k, l) for i in rng for j in rng for k in rng for l in rng]


def _pairs(N):
    rng = range(1, N + 1)
    return [(i, j) for i in rng for j in rng]


def ybe_check(kind, N, control=False):
    from .rmat import ybe_defect

    bad = ybe_defect(kind, N, control=control)
    if bad is not None:
        r, c, x = bad
        raise CheckFailed(f"R12 R13 R23 - R23 R13 R12 is nonzero at entry ({r}, {c})", repr(x))
    return True


def suite_ybe(c: SuiteConfig):
    tasks = [_task(f"ybe/{kind}", ybe_check, kind, c.n, params=dict(kind=kind, N=c.n))
             for kind in ("yangian", "quantum")]
    if c.negative_control:
        tasks[0] = _task("ybe/yangian[control]", ybe_check, "yangian", c.n, control=True,
                         params=dict(kind="yangian", N=c.n, control=True))
    return tasks


def suite_rtt_expansion(c: SuiteConfig):
    from .qloop import check_tt_expansion
    from .yangian import check_rtt_expansion

    ctl = c.negative_control
    return [
        _task("rtt/yangian", check_rtt_expansion, c.n, c.rmax, control=ctl, params=dict(N=c.n, levels=c.rmax)),
        _task("rtt/qloop-TT", check_tt_expansion, c.n, c.rmax - 1, params=dict(N=c.n, levels=c.rmax - 1)),
    ]


def suite_yangian_pbw(c: SuiteConfig):
    from .yangian import certify_commutator_rule, check_confluence

    tasks = []
    total = c.rmax + 2
    # the rule for (1,1,1,1) is trivially zero, so the control goes on a mixed quad
    target = (1, 2, 2, 1, 1, 1) if c.n > 1 else (1, 1, 1, 1, 1, 2)
    for i, j, k, l in _quads(c.n):
        for r in range(1, total):
            for s in range(1, total + 1 - r):
                ctl = c.negative_control and (i, j, k, l, r, s) == target
                tasks.append(_task("commutator", certify_commutator_rule, c.n, i, j, r, k, l, s, control=ctl,
                                   params=dict(i=i, j=j, k=k, l=l, r=r, s=s)))
    tasks.append(_task("confluence", check_confluence, c.n, 100, c.seed, params=dict(samples=100, seed=c.seed)))
    return tasks


def suite_embed_ytw(c: SuiteConfig):
    from .yangian import verify_twisted_embedding

    tasks = [_task(f"embed/{case}", verify_twisted_embedding, case, c.n, c.rmax, params=dict(case=case))
             for case in c.cases]
    if c.negative_control:
        case = c.cases[0]
        tasks[0] = _task(f"embed/{case}[control]", verify_twisted_embedding, case, c.n, min(c.rmax, 2),
                         image=flipped_yangian_image, params=dict(case=case, control=True))
    return tasks


def flipped_yangian_image(case, i, j, r, N):
    """The twisted Yangian embedding with the sign of s_12^(1) reversed."""
    from .yangian import embed_twisted_yangian

    e = embed_twisted_yangian(case, i, j, r, N)
    return -e if (i, j, r) == (1, 2, 1) else e


def suite_qloop_classical_limit(c: SuiteConfig):
    from .classical import classical_limit_component, psi_closed_form_check

    L = c.rmax - 1
    tasks = []
    for kind in ("TT", "TbarTbar", "TbarT"):
        for quad in _quads(c.n):
            for r in range(L + 1):
                for s in range(L + 1):
                    tasks.append(_task("limit", classical_limit_component, kind, *quad, r, s, c.n,
                                       params=dict(kind=kind, quad="".join(map(str, quad)), r=r, s=s)))
    first = True
    for fam in ("T", "Tbar", "Ttilde"):
        for i, j in _pairs(c.n):
            for m in range(c.mmax + 2):
                for r in range(m + 1 if fam == "Ttilde" else 3):
                    ctl = c.negative_control and first
                    first = False
                    tasks.append(_task("psi", psi_closed_form_check, fam, i, j, r, m, control=ctl,
                                       params=dict(family=fam, i=i, j=j, r=r, m=m)))
    for case in c.cases:
        for fam in ("S", "Stilde"):
            for i, j in _pairs(c.n):
                for m in range(c.mmax + 1):
                    for r in range(m + 1 if fam == "Stilde" else 3):
                        tasks.append(_task("psi", psi_closed_form_check, fam, i, j, r, m, case, c.n,
                                           params=dict(family=fam, case=case, i=i, j=j, r=r, m=m)))
    return tasks


def suite_rs_identity(c: SuiteConfig):
    from .qloop import check_rs_identity, rs_identity

    tasks = []
    for quad in _quads(c.n):
        for r in (1, 2):
            for s in (1, 2):
                for m in range(2):
                    for n in range(2):
                        kw = {}
                        if c.negative_control and not tasks:
                            kw["target"] = rs_identity(*quad, r, s, m, n, flip=True)
                        tasks.append(_task("rs", check_rs_identity, *quad, r, s, m, n, c.n, **kw,
                                           params=dict(quad="".join(map(str, quad)), r=r, s=s, m=m, n=n)))
    return tasks


def suite_graded_relation(c: SuiteConfig):
    from .filtration import graded_yangian_check, graded_yangian_expr, tbar_congruence_check

    tasks = []
    for m in range(c.mmax + 1):
        for n in range(c.mmax + 1 - m):
            for quad in _quads(c.n):
                kw = {}
                if c.negative_control and not tasks:
                    kw["target"] = graded_yangian_expr(*quad, m, n, c.n).flip(0)
                tasks.append(_task("graded", graded_yangian_check, *quad, m, n, c.n, **kw, bounds=c.bounds,
                                   params=dict(quad="".join(map(str, quad)), m=m, n=n)))
    for i, j in _pairs(c.n):
        for m in range(c.mmax + 2):
            tasks.append(_task("tbar", tbar_congruence_check, i, j, m, params=dict(i=i, j=j, m=m)))
    return tasks


def suite_separation(c: SuiteConfig):
    from .classical import monomial_independence_check, ordered_monomials

    tasks = []
    for m in range(c.mmax + 1):
        kw = {}
        if c.negative_control and m == c.mmax:
            mons = ordered_monomials(m, c.n, 2)
            kw["monomials"] = mons + [(("control",), -mons[0][1])]
        tasks.append(_task("independence", monomial_independence_check, m, c.n, 2, **kw,
                           params=dict(m=m, max_len=2)))
    return tasks


def suite_scong(c: SuiteConfig):
    from .filtration import scong_check, scong_expr, zeta_independence_check
    from .qloop import check_lemma_srm

    tasks = []
    for case in c.cases:
        for i, j in _pairs(c.n):
            for m in range(c.mmax + 1):
                for r in (1, 2):
                    tasks.append(_task("lemma", check_lemma_srm, case, i, j, r, m, c.n,
                                       params=dict(case=case, i=i, j=j, r=r, m=m)))
                    kw = {}
                    if c.negative_control and (i, j, r, m) == (1, 2, 1, min(1, c.mmax)) and case == c.cases[0]:
                        kw["target"] = scong_expr(case, i, j, r, m, c.n).flip(0)
                    tasks.append(_task("scong", scong_check, case, i, j, r, m, c.n, **kw, bounds=c.bounds,
                                       params=dict(case=case, i=i, j=j, r=r, m=m)))
                tasks.append(_task("zeta", zeta_independence_check, case, i, j, m, 1, 2, c.n, bounds=c.bounds,
                                   params=dict(case=case, i=i, j=j, m=m, r1=1, r2=2)))
    return tasks


def suite_twisted_phi(c: SuiteConfig):
    from .filtration import twisted_phi_check, twisted_phi_expr

    tasks = []
    for case in c.cases:
        for i, j in _pairs(c.n):
            for m in range(c.mmax + 1):
                kw = {}
                if c.negative_control and (i, j, m) == (1, 2, min(1, c.mmax)) and case == c.cases[0]:
                    kw["target"] = twisted_phi_expr(case, i, j, m, c.n).flip(0)
                tasks.append(_task("phi", twisted_phi_check, case, i, j, m, c.n, **kw, bounds=c.bounds,
                                   params=dict(case=case, i=i, j=j, m=m)))
    for case in c.cases:
        tasks.append(_task(f"embU/{case}", embU_rep_check, case, c.n, params=dict(case=case, points="2,-3/5")))
    return tasks


def embU_rep_check(case, N, flip=None):
    from .qloop import embU_image, embU_relations, rep_check

    rels, names = embU_relations(case, N, levels=2)
    return rep_check(rels, [POINTS], N, image=embU_image(case, N, flip), names=names, suite="embU")


SUITES = {
    "ybe": suite_ybe,
    "rtt-expansion": suite_rtt_expansion,
    "yangian-pbw": suite_yangian_pbw,
    "embed-ytw": suite_embed_ytw,
    "qloop-classical-limit": suite_qloop_classical_limit,
    "rs-identity": suite_rs_identity,
    "graded-relation": suite_graded_relation,
    "scong": suite_scong,
    "twisted-phi": suite_twisted_phi,
    "separation": suite_separation,
}


def run_suite(name: str, config: SuiteConfig | None = None, **overrides) -> Report:
    """Run every check of a suite; records come back in task order whatever the parallelism."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    config = config or SuiteConfig()
    for k, v in overrides.items():
        key = k.lower()
        if key not in {f.name for f in fields(SuiteConfig)}:
            raise InvalidConfig(f"unknown setting {k!r}")
        setattr(config, key, v)
    config.validate()
    tasks = SUITES[name](config)
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(run_task, tasks, chunksize=max(1, len(tasks) // (4 * config.jobs))))
    else:
        results = [run_task(t) for t in tasks]
    echo = {k: v for k, v in asdict(config).items() if k != "jobs"}
    rep = Report(suite=name, config=echo)
    for recs in results:
        for r in recs:
            rep.add(r)
    return rep


# ---------------------------------------------------------------------------
# output


def report_to_json(rep: Report, timings: bool = False) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "suite": rep.suite,
        "config": rep.config,
        "verdict": rep.verdict,
        "checks": [c.to_json(timings) for c in rep.checks],
    }


def report_from_json(d: dict) -> Report:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
    rep = Report(suite=d["suite"], config=dict(d.get("config", {})))
    for c in d["checks"]:
        rep.add(CheckRecord(c["name"], c["params"], c["verdict"], certificate=c.get("certificate"),
                            detail=c.get("detail"), method=c.get("method"), wall_time=c.get("wall_time")))
    return rep


def _md_cell(x) -> str:
    return str(x).replace("|", "\\|").replace("\n", " ")


def emit_report(rep: Report, fmt: str = "json", timings: bool = False) -> bytes:
    if fmt == "json":
        return (json.dumps(report_to_json(rep, timings), indent=2, sort_keys=False) + "\n").encode()
    if fmt in ("md", "markdown"):
        lines = [f"# {rep.suite}", "", f"verdict: **{rep.verdict}**", ""]
        lines.append("config: " + ", ".join(f"{k}={v}" for k, v in rep.config.items()))
        lines += ["", "| # | check | params | verdict | detail |", "|---|---|---|---|---|"]
        for n, c in enumerate(rep.checks):
            params = ", ".join(f"{k}={v}" for k, v in c.params.items())
            lines.append(f"| {n} | {_md_cell(c.name)} | {_md_cell(params)} | {c.verdict} | "
                         f"{_md_cell(c.detail or '')} |")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def exit_code(rep: Report) -> int:
    return {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[rep.verdict]


def read_config_file(path: str) -> dict:
    """Plain key = value lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidConfig(f"{path}:{lineno}: expected key = value")
            k, v = (x.strip() for x in line.split("=", 1))
            out[k.lower().replace("-", "_")] = v
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="verify", description="Run a verification suite and emit a report.")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--n", type=int)
    p.add_argument("--case", choices=sorted(CASES))
    p.add_argument("--rmax", type=int)
    p.add_argument("--mmax", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--relation-levels", type=int, help="congruence search bound (default: target level + 1)")
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--out")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--negative-control", action="store_true",
                   help="flip one sign in one target; the suite must then fail")
    p.add_argument("--timings", action="store_true", help="include wall times (breaks byte-identity)")
    return p


def config_from_args(args) -> SuiteConfig:
    cfg = SuiteConfig()
    known = {f.name for f in fields(SuiteConfig)}
    if args.config:
        for k, v in read_config_file(args.config).items():
            if k not in known:
                raise InvalidConfig(f"unknown setting {k!r} in {args.config}")
            if k == "case":
                setattr(cfg, k, v)
            elif k == "negative_control":
                setattr(cfg, k, v.lower() in ("1", "true", "yes"))
            elif k == "relation_levels" and v.lower() in ("none", "auto"):
                cfg.relation_levels = None
            else:
                try:
                    setattr(cfg, k, int(v))
                except ValueError:
                    raise InvalidConfig(f"{k} must be an integer, got {v!r}") from None
    for k in ("n", "case", "rmax", "mmax", "order", "jobs", "seed", "relation_levels"):
        v = getattr(args, k)
        if v is not None:
            setattr(cfg, k, v)
    if args.negative_control:
        cfg.negative_control = True
    return cfg.validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        rep = run_suite(args.suite, cfg)
    except (InvalidConfig, UnknownSuite, OSError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    data = emit_report(rep, args.format, args.timings)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return exit_code(rep)


if __name__ == "__main__":
    sys.exit(main())
