"""Outcome records for identity checks and their JSON form."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import mpmath
from mpmath import mp, mpf

OUTPUT_DIGITS = 50

PASS = "pass"
FAIL = "fail"
NOT_FOUND = "not-found"
FLAGGED = "flagged"
STATUSES = (PASS, FAIL, NOT_FOUND, FLAGGED)


@dataclass(frozen=True)
class Report:
    case: str
    category: str
    lhs: str
    rhs: str
    abs_error: str
    rel_error: str
    precision_bits: int
    status: str
    notes: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def fmt(x, digits: int = OUTPUT_DIGITS) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return mpmath.nstr(x, digits, min_fixed=-5, max_fixed=6)


def compare(case: str, category: str, lhs, rhs, ctx, *, tol=None, relative: bool = False,
            notes: str = "", on_mismatch: str = "fail") -> Report:
    """Build a report for ``lhs`` vs ``rhs``.

    The default tolerance is the context's 2^-working_bits.  With
    ``relative=True`` the tolerance is scaled by max(1, |rhs|).  A mismatch
    gets status ``on_mismatch`` ("fail", or "flagged" for a known
    transcription contingency).
    """
    with mp.workprec(ctx.prec):
        lhs, rhs = mpmath.mpmathify(lhs), mpmath.mpmathify(rhs)
        err = abs(lhs - rhs)
        rel = err / abs(rhs) if rhs != 0 else err
        bound = ctx.target_tolerance if tol is None else mpmath.mpmathify(tol)
        if relative:
            bound = bound * max(mpf(1), abs(rhs))
        ok = err < bound
        if relative:
            notes = (notes + "; " if notes else "") + "relative tolerance"
        return Report(case, category, fmt(lhs), fmt(rhs), fmt(err, 8), fmt(rel, 8),
                      ctx.working_bits, PASS if ok else on_mismatch, notes)


def reports_to_json(reports: Iterable[Report], path: Optional[str] = None) -> str:
    text = json.dumps([r.to_dict() for r in reports], indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def reports_from_json(text: str) -> list[Report]:
    return [Report(**item) for item in json.loads(text)]


def format_table(reports: Iterable[Report]) -> str:
    rows = [(r.case, r.category, r.status, r.abs_error, r.notes) for r in reports]
    header = ("case", "category", "status", "abs_error", "notes")
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    widths[-1] = min(widths[-1], 60)
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(str(x)[:w].ljust(w) for x, w in zip(row, widths)))
    return "\n".join(lines)
