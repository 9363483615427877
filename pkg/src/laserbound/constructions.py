"""The two seed tensors: the symmetric construction ``cw`` and its
asymmetric variant ``asym``.

Only what the bound computation needs is modelled: the support, the
logarithm of each base component's value, the border rank and closed forms
for the values of boundary components of the powers.  A matrix product
``<m, n, p>`` always contributes ``(rho/3) log(mnp)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .support import S3, SWAP23, Support, Triple, make_support


@dataclass(frozen=True)
class ConstructionSpec:
    """A seed tensor described through its support and component values.

    Attributes
    ----------
    name : str
        ``"cw"`` or ``"asym"``.
    q : int
        Size parameter of the seed.
    base_support : Support
        Degree-2 tight support of the seed.
    symmetry : tuple
        Coordinate permutations under which the seed is invariant.
    log_border_rank : float
        ``log(q + 2)`` for ``cw`` and ``log(q + 1)`` for ``asym``.
    """

    name: str
    q: int
    base_support: Support
    symmetry: tuple[tuple[int, int, int], ...]
    log_border_rank: float
    _base_exponents: dict
    _boundary_count: Callable[[int, int, int], int]
    _boundary_index: Callable[[Triple, int], int | None]

    def base_log_value(self, s: Triple, rho: float) -> float:
        """Log value of the base component at ``s``: ``(rho/3) log(size)``."""
        return rho / 3.0 * self._base_exponents[tuple(s)] * math.log(self.q)

    def boundary_formula(self, r: int, b: int, rho: float) -> float:
        """Log value of the level-``r`` boundary component with index ``b``."""
        return rho / 3.0 * math.log(self._boundary_count(r, b, self.q))

    def boundary_index(self, abc: Triple, r: int) -> int | None:
        """Index ``b`` if ``abc`` is a boundary triple of level ``r``, else ``None``."""
        return self._boundary_index(tuple(abc), r)

    def boundary_log_value(self, abc: Triple, r: int, rho: float) -> float | None:
        b = self.boundary_index(abc, r)
        return None if b is None else self.boundary_formula(r, b, rho)

    def orbit_representative(self, abc: Triple) -> Triple:
        """Canonical member of the symmetry orbit of ``abc`` (lexicographic max)."""
        return max((abc[p[0]], abc[p[1]], abc[p[2]]) for p in self.symmetry)

    def threshold(self, r: int) -> float:
        """``log`` of the border rank of the ``2**r``-th power."""
        return 2**r * self.log_border_rank


def _check_level_b(r: int, b: int) -> None:
    if r < 0 or not 0 <= b <= 2**r:
        raise ValueError(f"boundary index b={b} out of range for level {r}")


def cw_boundary_count(r: int, b: int, q: int) -> int:
    """Size ``N`` with the level-``r`` component ``(2^(r+1)-b, b, 0)`` isomorphic to ``<1, N, 1>``.

    Counts, with weight ``q`` per middle factor, the ways of writing the
    component as a product of ``2^r`` base components with zero last
    coordinate: ``e`` copies of ``(1,1,0)``, ``(b-e)/2`` copies of
    ``(0,2,0)`` and the rest ``(2,0,0)``.
    """
    _check_level_b(r, b)
    n = 2**r
    f = math.factorial
    total = 0
    for e in range(b % 2, b + 1, 2):
        k = (b - e) // 2
        total += f(n) // (f(e) * f(k) * f(n - e - k)) * q**e
    return total


def cw_boundary_value(r: int, b: int, q: int, rho: float) -> float:
    """Log value of ``cw^{(2^r)}(2^(r+1)-b, b, 0)``, exact integers before the log."""
    return rho / 3.0 * math.log(cw_boundary_count(r, b, q))


def asym_boundary_count(r: int, b: int, q: int) -> int:
    _check_level_b(r, b)
    return math.comb(2**r, b) * q**b


def asym_boundary_value(r: int, b: int, q: int, rho: float) -> float:
    """Log value ``(rho/3)(log C(2^r, b) + b log q)`` of the asym boundary component."""
    return rho / 3.0 * math.log(asym_boundary_count(r, b, q))


def _cw_index(abc: Triple, r: int) -> int | None:
    if 0 not in abc:
        return None
    nz = [x for x in abc if x]
    return min(nz) if len(nz) == 2 else 0


def _asym_index(abc: Triple, r: int) -> int | None:
    a, b, c = abc
    if b and c:
        return None
    return b or c


def _check_q(q: int) -> None:
    if not isinstance(q, int) or q < 1:
        raise ValueError(f"q must be a positive integer, got {q!r}")


def cw_construction(q: int) -> ConstructionSpec:
    """Symmetric seed: support of the six degree-2 triples, border rank ``q + 2``."""
    _check_q(q)
    S = make_support([(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)])
    exps = {s: (0 if 2 in s else 1) for s in S.triples}
    return ConstructionSpec("cw", q, S, S3, math.log(q + 2), exps, cw_boundary_count, _cw_index)


def asym_construction(q: int) -> ConstructionSpec:
    """Asymmetric seed: support ``{(2,0,0), (1,1,0), (1,0,1)}``, border rank ``q + 1``."""
    _check_q(q)
    S = make_support([(2, 0, 0), (1, 1, 0), (1, 0, 1)])
    exps = {(2, 0, 0): 0, (1, 1, 0): 1, (1, 0, 1): 1}
    return ConstructionSpec("asym", q, S, SWAP23, math.log(q + 1), exps, asym_boundary_count, _asym_index)


CONSTRUCTIONS = {"cw": cw_construction, "asym": asym_construction}


def get_construction(name: str, q: int) -> ConstructionSpec:
    try:
        return CONSTRUCTIONS[name](q)
    except KeyError:
        raise ValueError(f"unknown construction {name!r}") from None
