"""Syndetic / thick / thickly syndetic / cofinite classification of truncated sets.

Every decision is relative to a horizon H and caller thresholds:

* syndetic: A meets [1, H] and no two consecutive members of {0} ∪ A ∪ {H+1}
  are more than ``gap_bound`` apart (every window of ``gap_bound`` integers
  inside [1, H] meets A);
* thick: A contains ``run_request`` consecutive integers;
* thickly syndetic: for l = 0 .. run_request-1 the set of run starts
  {m : m, ..., m+l ∈ A} is syndetic in [1, H-l];
* cofinite: the terminal run [last_missing+1, H] has length >= ``tail``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidArgument
from .hitting import hitting_mask, mask_indices


@dataclass(frozen=True)
class SetClassReport:
    horizon: int
    gap_bound: int
    run_request: int
    tail: int
    syndetic: bool
    max_gap: int
    thick: bool
    max_run: int
    run_at: int | None
    thickly_syndetic: bool
    gap_table: tuple  # (l, max gap of run starts, syndetic?)
    ts_failure: dict | None
    cofinite: bool
    last_missing: int
    provenance: tuple = ()

    def to_json(self):
        return {
            "horizon": self.horizon,
            "gap_bound": self.gap_bound,
            "run_request": self.run_request,
            "tail": self.tail,
            "syndetic": {"holds": self.syndetic, "max_gap": self.max_gap},
            "thick": {"holds": self.thick, "max_run": self.max_run, "run_at": self.run_at},
            "thickly_syndetic": {
                "holds": self.thickly_syndetic,
                "table": [list(r) for r in self.gap_table],
                "failure": self.ts_failure,
            },
            "cofinite": {"holds": self.cofinite, "last_missing": self.last_missing},
            "provenance": list(self.provenance),
        }


def max_gap(members, lo, hi):
    """Largest difference between consecutive members of {lo-1} ∪ A ∪ {hi+1}.

    Also returns the position after which the largest gap opens.
    """
    prev, best, at = lo - 1, 0, lo - 1
    for a in members:
        if a < lo or a > hi:
            continue
        if a - prev > best:
            best, at = a - prev, prev
        prev = a
    if hi + 1 - prev > best:
        best, at = hi + 1 - prev, prev
    return best, at


def _is_syndetic(members, lo, hi, gap_bound):
    gap, at = max_gap(members, lo, hi)
    nonempty = any(lo <= a <= hi for a in members)
    return nonempty and gap <= gap_bound, gap, at


def runs(A):
    """Maximal runs of consecutive integers as (start, length)."""
    out = []
    for a in A:
        if out and a == out[-1][0] + out[-1][1]:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((a, 1))
    return out


def classify(A, horizon, run_request, gap_bound, cofinite_tail=None):
    if horizon < 1 or run_request < 1 or gap_bound < 1:
        raise InvalidArgument("horizon, run_request and gap_bound must be >= 1")
    A = sorted(set(int(a) for a in A))
    if A and (A[0] < 1 or A[-1] > horizon):
        raise InvalidArgument("set must lie in [1, horizon]")
    tail = cofinite_tail if cofinite_tail is not None else max(1, horizon // 2)

    syn, gap, _ = _is_syndetic(A, 1, horizon, gap_bound)

    rs = runs(A)
    best = max(rs, key=lambda r: (r[1], -r[0]), default=None)
    max_run = best[1] if best else 0
    thick = max_run >= run_request
    run_at = next((s for s, length in rs if length >= run_request), None)

    table, failure = [], None
    for l in range(run_request):
        starts = [s + i for s, length in rs for i in range(length - l)]
        hi = horizon - l
        if hi < 1:
            ok, g, at = False, 0, 0
        else:
            ok, g, at = _is_syndetic(starts, 1, hi, gap_bound)
        table.append((l, g, ok))
        if not ok and failure is None:
            # no run of length l+1 starts inside the window (at, at+g)
            failure = {"l": l, "run_length": l + 1, "window": [at + 1, at + g - 1], "gap": g}
    ts = failure is None

    present = set(A)
    last_missing = next((n for n in range(horizon, 0, -1) if n not in present), 0)
    cof = horizon - last_missing >= tail

    return SetClassReport(
        horizon, gap_bound, run_request, tail, syn, gap, thick, max_run, run_at,
        ts, tuple(table), failure, cof, last_missing,
    )


def classify_hitting(sys, U, V, horizon, run_request, gap_bound, cofinite_tail=None):
    A = mask_indices(hitting_mask(sys, U, V, horizon))
    rep = classify(A, horizon, run_request, gap_bound, cofinite_tail)
    return SetClassReport(**{**rep.__dict__, "provenance": (sys.describe(), U.describe(), V.describe())})
