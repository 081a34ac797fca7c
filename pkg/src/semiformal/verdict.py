"""Check outcomes and certified interval comparisons."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .exactnum import Ival, rat


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Verdict:
    name: str
    status: Status
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is Status.PASS

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def of(cls, name: str, passed: bool, **detail) -> Verdict:
        return cls(name, Status.PASS if passed else Status.FAIL, detail)


def combine(name: str, verdicts: list[Verdict], **detail) -> Verdict:
    """Fail beats undecided beats pass."""
    statuses = {v.status for v in verdicts}
    if Status.FAIL in statuses:
        status = Status.FAIL
    elif Status.UNDECIDED in statuses:
        status = Status.UNDECIDED
    else:
        status = Status.PASS
    failed = [v.name for v in verdicts if v.status is not Status.PASS]
    return Verdict(name, status, {"count": len(verdicts), "not_passed": failed, **detail})


def certify_le(
    lhs: Callable[[Fraction], Ival],
    rhs: Callable[[Fraction], Ival],
    eps=Fraction(1, 10**8),
    retries: int = 6,
) -> tuple[Status, Ival, Ival]:
    """Decide ``lhs <= rhs`` from enclosures, refining ``eps`` on overlap.

    ``lhs``/``rhs`` map a width to an enclosure of that width.  Overlap that
    survives ``retries`` refinements (each squares the 1/eps scale) is reported
    as undecided, never as false.
    """
    eps = rat(eps)
    for _ in range(retries + 1):
        a, b = lhs(eps), rhs(eps)
        if a.hi <= b.lo:
            return Status.PASS, a, b
        if a.lo > b.hi:
            return Status.FAIL, a, b
        eps = eps * eps if eps < 1 else eps / 1024
    return Status.UNDECIDED, a, b
