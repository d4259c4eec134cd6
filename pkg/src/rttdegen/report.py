"""Check records and suite reports shared by the verification modules."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


class CheckFailed(AssertionError):
    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail


@dataclass
class CheckRecord:
    name: str
    params: dict
    verdict: str
    certificate: dict | None = None
    detail: str | None = None
    method: str | None = None
    wall_time: float | None = None

    def to_json(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("wall_time")
        return d


@dataclass
class Report:
    suite: str
    config: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add(self, rec: CheckRecord) -> CheckRecord:
        self.checks.append(rec)
        return rec

    def extend(self, other: "Report"):
        self.checks.extend(other.checks)

    @property
    def verdict(self) -> str:
        vs = {c.verdict for c in self.checks}
        if FAIL in vs:
            return FAIL
        if INCONCLUSIVE in vs:
            return INCONCLUSIVE
        return PASS

    @property
    def all_pass(self) -> bool:
        return all(c.verdict == PASS for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.verdict != PASS]

    def raise_on_fail(self):
        bad = self.failures()
        if bad:
            raise CheckFailed(f"{len(bad)} check(s) did not pass; first: {bad[0].name} {bad[0].params}",
                              bad[0].detail)
        return self


def record(name: str, params: dict, ok: bool, *, detail=None, certificate=None, method=None) -> CheckRecord:
    return CheckRecord(name, dict(params), PASS if ok else FAIL,
                       certificate=certificate, detail=None if ok else detail, method=method)
