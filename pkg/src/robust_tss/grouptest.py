"""Cheater identification by group testing over t-subsets of holders.

Each test reconstructs the secret from one t-subset and verifies it; a test
passes exactly when every participant is honest. With at least t honest
holders, every honest holder sits in some all-honest test, while a cheater
fails every test it joins; that separates the two groups.

The test oracle is any ``test_fn(subset) -> bool`` (True = pass), so this
module knows nothing about fields or MACs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "MAX_HOLDERS",
    "IdentificationResult",
    "Syndrome",
    "TestPlan",
    "build_plan",
    "identify_adaptive",
    "identify_full",
    "invite_and_extend",
    "run_plan",
]

MAX_HOLDERS = 20

TestFn = Callable[[tuple[int, ...]], bool]


@dataclass(frozen=True)
class TestPlan:
    n: int
    t: int
    rows: tuple[tuple[int, ...], ...]

    __test__ = False  # not a pytest class

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def column_weight(self) -> int:
        return comb(self.n - 1, self.t - 1)

    @property
    def matrix(self) -> np.ndarray:
        """The T x n 0/1 incidence matrix."""
        m = np.zeros((self.size, self.n), dtype=np.int64)
        for r, row in enumerate(self.rows):
            m[r, list(row)] = 1
        return m

    def to_json(self, syndrome: "Syndrome | None" = None) -> str:
        doc = {"n": self.n, "t": self.t, "rows": [list(r) for r in self.rows]}
        if syndrome is not None:
            doc["syndrome"] = str(syndrome)
        return json.dumps(doc)


@dataclass(frozen=True)
class Syndrome:
    """Test outcomes; ``True`` marks a failed test (verification inequality)."""

    bits: tuple[bool, ...]

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def parse(cls, text: str) -> "Syndrome":
        if set(text) - {"0", "1"}:
            raise ValueError("syndrome must be a 0/1 string")
        return cls(tuple(c == "1" for c in text))

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class IdentificationResult:
    n: int
    t: int
    honest: frozenset[int]
    cheaters: frozenset[int]
    tests_run: int
    status: str  # "identified" | "insufficient-honest"
    first_pass: int | None = None  # tests spent reaching the first passing test

    @property
    def identified(self) -> bool:
        return self.status == "identified"


def build_plan(n: int, t: int) -> TestPlan:
    """All t-subsets of ``range(n)`` in lexicographic order."""
    if not 2 <= t <= n <= MAX_HOLDERS:
        raise ValueError(f"need 2 <= t <= n <= {MAX_HOLDERS}, got n={n}, t={t}")
    return TestPlan(n, t, tuple(combinations(range(n), t)))


def run_plan(plan: TestPlan, test_fn: TestFn) -> Syndrome:
    """Evaluate every test of the plan; order does not matter."""
    return Syndrome(tuple(not test_fn(row) for row in plan.rows))


def identify_full(syndrome: Syndrome, plan: TestPlan) -> IdentificationResult:
    """Holders whose every test failed are cheaters: w = u^T M, w_l == C(n-1, t-1)."""
    if len(syndrome) != plan.size:
        raise ValueError(f"syndrome has {len(syndrome)} bits, plan has {plan.size} tests")
    u = np.array(syndrome.bits, dtype=np.int64)
    if u.all():
        return IdentificationResult(
            plan.n, plan.t, frozenset(), frozenset(), plan.size, "insufficient-honest"
        )
    w = u @ plan.matrix
    cheaters = frozenset(int(i) for i in np.flatnonzero(w == plan.column_weight))
    honest = frozenset(range(plan.n)) - cheaters
    first = int(np.argmin(u)) + 1
    return IdentificationResult(plan.n, plan.t, honest, cheaters, plan.size, "identified", first)


def _extend_from(core: Sequence[int], passing: Sequence[int], n: int, test_fn: TestFn):
    honest = set(passing)
    cheaters = set()
    runs = 0
    for j in range(n):
        if j in honest:
            continue
        runs += 1
        if test_fn(tuple(sorted((*core, j)))):
            honest.add(j)
        else:
            cheaters.add(j)
    return frozenset(honest), frozenset(cheaters), runs


def identify_adaptive(test_fn: TestFn, n: int, t: int, plan: TestPlan | None = None) -> IdentificationResult:
    """Walk the plan to the first passing test, then test each remaining holder
    against t-1 members of that group. Uses at most first_pass + (n - t) tests.

    ``test_fn`` must be deterministic for the duration of the call; callers
    snapshot the submitted shares beforehand.
    """
    plan = plan or build_plan(n, t)
    if (plan.n, plan.t) != (n, t):
        raise ValueError("plan does not match n, t")
    for k, row in enumerate(plan.rows, start=1):
        if test_fn(row):
            honest, cheaters, extra = _extend_from(row[: t - 1], row, n, test_fn)
            return IdentificationResult(n, t, honest, cheaters, k + extra, "identified", k)
    return IdentificationResult(n, t, frozenset(), frozenset(), plan.size, "insufficient-honest")


def invite_and_extend(
    current: IdentificationResult, extra_honest: Sequence[int], test_fn: TestFn
) -> IdentificationResult:
    """Re-identify after pulling in t known-honest holders.

    The invited holders take indices ``current.n .. current.n + t - 1`` in the
    combined group of ``n + t`` holders (plan ``C(n+t, t) x (n+t)``). Their
    own test is run first, so the adaptive walk passes immediately and then
    costs one test per original holder.
    """
    n, t = current.n, current.t
    extra = tuple(sorted(extra_honest))
    if len(extra) != t:
        raise ValueError(f"need exactly t={t} invited holders")
    if extra != tuple(range(n, n + t)):
        raise ValueError(f"invited holders must be indexed {n}..{n + t - 1}")
    total = n + t
    build_plan(total, t)  # enforces the size guard
    if not test_fn(extra):
        raise ValueError("invited group failed its own test; it is not honest")
    honest, cheaters, extra_runs = _extend_from(extra[: t - 1], extra, total, test_fn)
    return IdentificationResult(total, t, honest, cheaters, 1 + extra_runs, "identified", 1)
