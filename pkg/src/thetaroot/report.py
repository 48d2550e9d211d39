"""Structured pass/fail records shared by the identity checkers and the
verification harness."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field


@dataclass
class VerdictReport:
    id: str
    order: int
    passed: bool
    first_fail: dict | None = None
    notes: str = ""
    wall_ms: float = 0.0

    def __post_init__(self):
        if not self.passed and self.first_fail is None:
            raise ValueError("failing verdict %r must carry first_fail" % self.id)

    def to_dict(self, order_key="order"):
        return {
            "id": self.id,
            order_key: self.order,
            "pass": self.passed,
            "first_fail": self.first_fail,
            "notes": self.notes,
            "wall_ms": round(self.wall_ms, 3),
        }

    def to_json(self, order_key="order"):
        return json.dumps(self.to_dict(order_key), sort_keys=True)

    def summary_line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = " (%s)" % self.notes if self.notes else ""
        return "%-4s %-22s order=%d%s" % (status, self.id, self.order, extra)


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self.t0) * 1000.0
        return False


def verdict(id, order, first_fail=None, notes="", wall_ms=0.0):
    return VerdictReport(
        id=id,
        order=order,
        passed=first_fail is None,
        first_fail=first_fail,
        notes=notes,
        wall_ms=wall_ms,
    )
