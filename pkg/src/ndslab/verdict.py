"""Horizon-bounded verdicts and check parameters."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

from .errors import InvalidArgument


class Status(str, Enum):
    HOLDS = "HoldsUpToHorizon"
    FAILS = "FailsWithCertificate"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Verdict:
    """Answer of one check.

    ``certificate`` and ``witnesses`` are JSON-ready summaries; ``evidence``
    keeps the live objects (open sets, points, systems) needed to replay a
    failure through the primitives.
    """

    notion: str
    status: Status
    params: dict = field(default_factory=dict)
    certificate: dict | None = None
    witnesses: dict | None = None
    notes: tuple = ()
    evidence: dict | None = field(default=None, compare=False, repr=False)

    @property
    def holds(self):
        return self.status is Status.HOLDS

    @property
    def fails(self):
        return self.status is Status.FAILS

    def to_json(self):
        out = {
            "notion": self.notion,
            "status": self.status.value,
            "params": jsonable(self.params),
        }
        if self.certificate is not None:
            out["certificate"] = jsonable(self.certificate)
        if self.witnesses is not None:
            out["witnesses"] = jsonable(self.witnesses)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def holds(notion, params, witnesses=None, notes=(), evidence=None):
    return Verdict(notion, Status.HOLDS, dict(params), None, witnesses, tuple(notes), evidence)


def fails(notion, params, certificate, notes=(), evidence=None):
    return Verdict(notion, Status.FAILS, dict(params), certificate, None, tuple(notes), evidence)


def undecided(notion, params, notes=(), evidence=None):
    return Verdict(notion, Status.UNDECIDED, dict(params), None, None, tuple(notes), evidence)


def jsonable(x):
    """Convert nested values to canonical JSON types (fractions become strings)."""
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return x


NOTIONS = (
    "transitive",
    "weakly_mixing",
    "mixing",
    "totally_transitive",
    "multi_transitive",
    "multi_transitive_vector",
    "strongly_multi_transitive",
    "mildly_mixing_surrogate",
    "delta_transitive",
    "delta_mixing",
    "minimal",
    "syndetically_transitive",
    "thickly_transitive",
    "thickly_syndetically_transitive",
)


@dataclass(frozen=True)
class CheckSpec:
    """Truncation parameters shared by the property checkers.

    ``resolution`` picks the basis, ``horizon`` bounds every time index.
    ``index_set`` is the finite stand-in for the set A used by Delta-mixing.
    ``cofinite_tail`` is the minimal length of the terminal run of a hitting
    set that counts as cofinite (default: half the horizon).
    """

    notion: str = "transitive"
    resolution: object = 2
    horizon: int = 32
    order: int = 2
    m_bound: int = 2
    n_bound: int = 3
    vector: tuple = (1,)
    vector_bound: tuple = (3, 3)
    index_set: tuple = ()
    gap_bound: int = 10
    run_request: int = 3
    cofinite_tail: int | None = None
    tuple_cap: int = 10**6

    def __post_init__(self):
        if self.notion not in NOTIONS:
            raise InvalidArgument(f"unknown notion {self.notion!r}")
        res = self.resolution
        if isinstance(res, (list, tuple)):
            if not res or any(int(r) < 1 for r in res):
                raise InvalidArgument("resolution must be >= 1")
            object.__setattr__(self, "resolution", tuple(int(r) for r in res))
        elif int(res) < 1:
            raise InvalidArgument("resolution must be >= 1")
        for name in ("horizon", "order", "m_bound", "n_bound", "gap_bound", "run_request", "tuple_cap"):
            if int(getattr(self, name)) < 1:
                raise InvalidArgument(f"{name} must be >= 1")
        if self.order < 2 and self.notion == "weakly_mixing":
            raise InvalidArgument("weak mixing order must be >= 2")
        object.__setattr__(self, "vector", tuple(int(a) for a in self.vector))
        if any(a < 1 for a in self.vector) or not self.vector:
            raise InvalidArgument("vector entries must be positive")
        vb = tuple(int(v) for v in self.vector_bound)
        if len(vb) != 2 or min(vb) < 1:
            raise InvalidArgument("vector_bound is (max length, max entry), both >= 1")
        object.__setattr__(self, "vector_bound", vb)
        A = tuple(sorted(set(int(a) for a in self.index_set)))
        if A and (A[0] < 1 or A[-1] > self.horizon):
            raise InvalidArgument("index_set must lie in [1, horizon]")
        object.__setattr__(self, "index_set", A)
        if self.cofinite_tail is not None and int(self.cofinite_tail) < 1:
            raise InvalidArgument("cofinite_tail must be >= 1")

    @property
    def tail(self):
        return self.cofinite_tail if self.cofinite_tail is not None else max(1, self.horizon // 2)

    def with_(self, **kw):
        return replace(self, **kw)

    def to_json(self):
        return {
            "notion": self.notion,
            "resolution": list(self.resolution) if isinstance(self.resolution, tuple) else self.resolution,
            "horizon": self.horizon,
            "order": self.order,
            "m_bound": self.m_bound,
            "n_bound": self.n_bound,
            "vector": list(self.vector),
            "vector_bound": list(self.vector_bound),
            "index_set": list(self.index_set),
            "gap_bound": self.gap_bound,
            "run_request": self.run_request,
            "cofinite_tail": self.tail,
            "tuple_cap": self.tuple_cap,
        }
