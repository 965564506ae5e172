from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
VACUOUS = "vacuous"


@dataclass(frozen=True)
class Check:
    """Verdict of one lemma clause; ``witness`` is JSON-ready and only set on failure."""

    name: str
    status: str
    witness: Any = None

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "witness": self.witness}


def verdict(name: str, failures: list, *, limit: int = 1) -> Check:
    if failures:
        return Check(name, FAIL, failures[0] if limit == 1 else failures[:limit])
    return Check(name, PASS)


def all_ok(checks: Iterable[Check]) -> bool:
    return all(c.ok for c in checks)
