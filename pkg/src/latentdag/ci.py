"""Greedy search for a separating set: grow Z one variable at a time,
always adding the candidate that drives the independence statistic lowest.

The search is deliberately not exhaustive. A returned failure means the
greedy path found no separator within the size budget — it is *evidence* of
dependence, not a proof. Callers (triangle classification in particular)
treat it exactly that way.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .scoring import ScoreContext, f_bic, is_independent

__all__ = ["SeparatorQuery", "SeparatorResult", "find_separator"]


@dataclass(frozen=True)
class SeparatorQuery:
    """Inputs of one separator search.

    ``compulsory`` variables are forced into Z before the search starts;
    ``forbidden`` ones may never enter it. ``h`` caps |Z|.
    """

    u: int
    v: int
    h: int = 7
    alpha: float = 0.05
    compulsory: frozenset[int] = frozenset()
    forbidden: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "compulsory", frozenset(self.compulsory))
        object.__setattr__(self, "forbidden", frozenset(self.forbidden))
        if self.u == self.v:
            raise ValueError("u and v must differ")
        if self.h < 0:
            raise ValueError("h must be >= 0")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if self.u in self.compulsory or self.v in self.compulsory:
            raise ValueError("u and v may not be compulsory")
        if self.compulsory & self.forbidden:
            raise ValueError("compulsory and forbidden sets overlap")


@dataclass
class SeparatorResult:
    found: bool
    z: frozenset[int] | None = None
    trace: list[tuple[int, float]] = field(default_factory=list)


def find_separator(q: SeparatorQuery, ctx: ScoreContext) -> SeparatorResult:
    """Search for Z with u independent of v given Z, |Z| <= h.

    Z starts as the compulsory set. If the current Z does not separate, the
    candidate whose addition yields the smallest statistic is committed
    (ties break toward the lowest variable id) and the test repeats, until
    independence is reached or the size budget is spent.
    """
    z = set(q.compulsory)
    blocked = set(q.forbidden) | {q.u, q.v}
    trace: list[tuple[int, float]] = []

    if len(z) > q.h:
        return SeparatorResult(found=False, trace=trace)
    if is_independent(ctx, q.u, q.v, z, q.alpha).independent:
        return SeparatorResult(found=True, z=frozenset(z), trace=trace)

    n_vars = ctx.dataset.n_variables
    while len(z) < q.h:
        best: int | None = None
        best_stat = float("inf")
        for y in range(n_vars):
            if y in z or y in blocked:
                continue
            stat = f_bic(ctx, q.u, q.v, z | {y}).statistic
            if stat < best_stat:  # strict: ties keep the lowest id
                best, best_stat = y, stat
        if best is None:
            break  # candidate pool exhausted before the budget
        z.add(best)
        trace.append((best, best_stat))
        if is_independent(ctx, q.u, q.v, z, q.alpha).independent:
            return SeparatorResult(found=True, z=frozenset(z), trace=trace)
    return SeparatorResult(found=False, trace=trace)
