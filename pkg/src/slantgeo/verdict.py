"""Result record shared by every numerical check."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

PASS, FAIL, VACUOUS, INDETERMINATE = "pass", "fail", "vacuous", "indeterminate"

# residuals in [tol, BAND * tol] are neither accepted nor rejected
BAND = 10.0


def holds(residual: float, tol: float) -> Optional[bool]:
    """Three-valued test: True below ``tol``, False above ``BAND * tol``, else None."""
    if not math.isfinite(residual):
        return False
    if residual < tol:
        return True
    if residual > BAND * tol:
        return False
    return None


@dataclass
class CheckVerdict:
    check_id: str
    points_sampled: int
    lhs_residual: float
    rhs_residual: float
    passed: bool
    vacuous: bool = False
    status: str = FAIL
    tolerance: float = 0.0
    lhs_holds: Optional[bool] = None
    rhs_holds: Optional[bool] = None
    notes: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.lhs_residual, self.rhs_residual)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("lhs_residual", "rhs_residual"):
            if not math.isfinite(d[key]):
                d[key] = None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckVerdict":
        d = dict(d)
        for key in ("lhs_residual", "rhs_residual"):
            if d[key] is None:
                d[key] = math.inf
        d["notes"] = list(d.get("notes", []))
        return cls(**d)


def vacuous(check_id: str, points: int, reason: str, tol: float = 0.0) -> CheckVerdict:
    return CheckVerdict(check_id, points, 0.0, 0.0, passed=True, vacuous=True,
                        status=VACUOUS, tolerance=tol, notes=[reason])


def direct(check_id: str, points: int, residual: float, tol: float,
           other: float = 0.0, notes=None) -> CheckVerdict:
    """Verdict for a single identity: passes when both residuals are below ``tol``."""
    ok = holds(max(residual, other), tol)
    status = PASS if ok else (INDETERMINATE if ok is None else FAIL)
    return CheckVerdict(check_id, points, residual, other, passed=bool(ok),
                        status=status, tolerance=tol, lhs_holds=ok, notes=list(notes or []))


def equivalence(check_id: str, points: int, lhs: float, rhs: float, tol: float,
                notes=None) -> CheckVerdict:
    """Verdict for ``(i) <=> (ii)``: passes when both sides are decided and agree."""
    a, b = holds(lhs, tol), holds(rhs, tol)
    if a is None or b is None:
        status = INDETERMINATE
    else:
        status = PASS if a == b else FAIL
    return CheckVerdict(check_id, points, lhs, rhs, passed=status == PASS, status=status,
                        tolerance=tol, lhs_holds=a, rhs_holds=b, notes=list(notes or []))
