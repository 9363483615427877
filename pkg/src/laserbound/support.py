"""Integer-triple supports, coordinate and mirror symmetries, orbits and the
exact compatibility kernel.

A support is a finite set of integer triples.  It is *tight* when all
triples share a coordinate sum (the degree).  Groups act on a support by
permuting its triples; they are stored as index permutations relative to
the canonical (lexicographic) order of the support.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

Triple = tuple[int, int, int]

#: Coordinate permutations of ``{0, 1, 2}``; ``sigma`` acts by
#: ``(s[sigma[0]], s[sigma[1]], s[sigma[2]])``.
S3: tuple[tuple[int, int, int], ...] = tuple(itertools.permutations(range(3)))
SWAP23: tuple[tuple[int, int, int], ...] = ((0, 1, 2), (0, 2, 1))
TRIVIAL_L: tuple[tuple[int, int, int], ...] = ((0, 1, 2),)


class SupportError(ValueError):
    """Raised for malformed supports or group actions that do not preserve them."""


@dataclass(frozen=True)
class Support:
    """Canonically ordered set of integer triples.

    Attributes
    ----------
    triples : tuple of Triple
        Distinct triples in lexicographic order.
    degree : int or None
        Common coordinate sum, or ``None`` if the support is not tight.
    alphabets : tuple of tuple of int
        Sorted coordinate values used on each axis.
    b_bound : int or None
        ``1 + max coordinate`` when every coordinate is nonnegative.
    """

    triples: tuple[Triple, ...]
    degree: int | None
    alphabets: tuple[tuple[int, ...], ...]
    b_bound: int | None
    _index: dict = field(repr=False, compare=False, hash=False)

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __contains__(self, s) -> bool:
        return tuple(s) in self._index

    def index(self, s: Sequence[int]) -> int:
        """Position of ``s`` in the canonical order."""
        try:
            return self._index[tuple(s)]
        except KeyError:
            raise SupportError(f"triple {tuple(s)} is not in the support") from None

    @property
    def is_tight(self) -> bool:
        return self.degree is not None

    def array(self) -> np.ndarray:
        """Triples as an ``(n, 3)`` integer array."""
        return np.array(self.triples, dtype=np.int64).reshape(len(self), 3)

    def incidence(self) -> list[np.ndarray]:
        """Per-axis 0/1 matrices mapping weights on S to marginal vectors.

        ``incidence()[l][i, j] == 1`` iff the ``j``-th triple has
        ``alphabets[l][i]`` as its ``l``-th coordinate.
        """
        mats = []
        arr = self.array()
        for axis, alph in enumerate(self.alphabets):
            pos = np.searchsorted(alph, arr[:, axis])
            A = np.zeros((len(alph), len(self)))
            A[pos, np.arange(len(self))] = 1.0
            mats.append(A)
        return mats


def make_support(triples: Iterable[Sequence[int]]) -> Support:
    """Build a canonical support from any iterable of triples.

    Examples
    --------
    >>> S = make_support([(2, 0, 0), (1, 1, 0), (1, 0, 1)])
    >>> S.degree, len(S), S.alphabets[0]
    (2, 3, (1, 2))
    """
    items = sorted({_as_triple(t) for t in triples})
    if not items:
        raise SupportError("a support needs at least one triple")
    sums = {sum(t) for t in items}
    degree = sums.pop() if len(sums) == 1 else None
    alphabets = tuple(tuple(sorted({t[ax] for t in items})) for ax in range(3))
    b_bound = None
    if min(min(t) for t in items) >= 0:
        b_bound = 1 + max(max(t) for t in items)
    index = {t: i for i, t in enumerate(items)}
    return Support(tuple(items), degree, alphabets, b_bound, index)


def _as_triple(t: Sequence[int]) -> Triple:
    if len(t) != 3:
        raise SupportError(f"expected a triple, got {t!r}")
    out = tuple(int(x) for x in t)
    if any(o != x for o, x in zip(out, t)):
        raise SupportError(f"non-integer coordinate in {t!r}")
    return out  # type: ignore[return-value]


@dataclass(frozen=True)
class SymmetryGroup:
    """A group of permutations of a support's triples.

    Each element is a tuple ``g`` with ``g[i]`` the index of the image of
    triple ``i``.  ``provenance`` is one of ``"trivial"``, ``"coordinate"``
    or ``"mirror"``.
    """

    elements: tuple[tuple[int, ...], ...]
    provenance: str
    n: int

    def __post_init__(self):
        ident = tuple(range(self.n))
        els = set(self.elements)
        if ident not in els:
            raise SupportError("group lacks the identity")
        for g in self.elements:
            if sorted(g) != list(range(self.n)):
                raise SupportError("group element is not a permutation")
        for g, h in itertools.product(self.elements, repeat=2):
            if tuple(g[h[i]] for i in range(self.n)) not in els:
                raise SupportError("group is not closed under composition")

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_trivial(self) -> bool:
        return self.order == 1


def trivial_group(S: Support) -> SymmetryGroup:
    return SymmetryGroup((tuple(range(len(S))),), "trivial", len(S))


def _permute(s: Triple, sigma: Sequence[int]) -> Triple:
    return (s[sigma[0]], s[sigma[1]], s[sigma[2]])


def _close_coordinate_set(L: Iterable[Sequence[int]]) -> list[tuple[int, int, int]]:
    out = {tuple(int(i) for i in sigma) for sigma in L}
    out.add((0, 1, 2))
    for sigma in out:
        if sorted(sigma) != [0, 1, 2]:
            raise SupportError(f"{sigma} is not a permutation of the three axes")
    while True:
        new = {tuple(a[b[i]] for i in range(3)) for a in out for b in out} - out
        if not new:
            return sorted(out)
        out |= new


def induced_group(S: Support, L: Iterable[Sequence[int]]) -> SymmetryGroup:
    """Group of coordinate permutations from ``L`` restricted to ``S``.

    ``L`` is closed under composition first, so generators suffice.
    Raises :class:`SupportError` naming a triple whose image leaves ``S``.
    """
    perms = []
    for sigma in _close_coordinate_set(L):
        g = []
        for s in S.triples:
            image = _permute(s, sigma)
            if image not in S:
                raise SupportError(f"support is not symmetric: {s} maps to {image} under {sigma}")
            g.append(S.index(image))
        perms.append(tuple(g))
    distinct = tuple(sorted(set(perms)))
    prov = "trivial" if len(distinct) == 1 else "coordinate"
    return SymmetryGroup(distinct, prov, len(S))


def mirror_group(S: Support, target: Sequence[int]) -> SymmetryGroup:
    """The group ``{id, pi}`` with ``pi(s) = target - s``.

    Returns the trivial group when ``pi`` fixes every triple.
    """
    a, b, c = _as_triple(target)
    g = []
    for s in S.triples:
        image = (a - s[0], b - s[1], c - s[2])
        if image not in S:
            raise SupportError(f"reflection through {target} sends {s} outside the support")
        g.append(S.index(image))
    ident = tuple(range(len(S)))
    if tuple(g) == ident:
        return trivial_group(S)
    return SymmetryGroup((ident, tuple(g)), "mirror", len(S))


@dataclass(frozen=True)
class OrbitIndex:
    """Orbit labels of a group action, numbered in order of first appearance."""

    orbit_id: np.ndarray
    orbit_count: int

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.orbit_id, minlength=self.orbit_count)

    def representatives(self) -> np.ndarray:
        """Index of the first triple of each orbit."""
        reps = np.full(self.orbit_count, -1)
        for i, o in enumerate(self.orbit_id):
            if reps[o] < 0:
                reps[o] = i
        return reps

    def averaging(self) -> np.ndarray:
        """Matrix ``E`` with ``E[s, o] = 1/|o|`` for ``s`` in ``o``.

        Maps orbit masses to a G-invariant distribution on the support.
        """
        n = len(self.orbit_id)
        E = np.zeros((n, self.orbit_count))
        E[np.arange(n), self.orbit_id] = 1.0 / self.sizes[self.orbit_id]
        return E


def orbits(S: Support, G: SymmetryGroup) -> OrbitIndex:
    if G.n != len(S):
        raise SupportError("group acts on a support of a different size")
    oid = np.full(len(S), -1, dtype=np.int64)
    k = 0
    for i in range(len(S)):
        if oid[i] >= 0:
            continue
        for g in G.elements:
            oid[g[i]] = k
        k += 1
    return OrbitIndex(oid, k)


@dataclass(frozen=True)
class KernelBasis:
    """Integer basis of the G-invariant functions on S with zero marginals.

    ``R`` has one row per triple and ``chi`` columns, each with integer
    entries of gcd 1 whose first nonzero entry is positive.
    """

    R: np.ndarray
    chi: int
    dim: int

    def as_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(x)) for x in row] for row in self.R]

    def touched_rows(self) -> np.ndarray:
        """Mask of triples on which some kernel vector is nonzero."""
        if self.chi == 0:
            return np.zeros(self.R.shape[0], dtype=bool)
        return np.any(self.R != 0, axis=1)


def orbit_constraint_matrix(S: Support, orb: OrbitIndex) -> list[list[int]]:
    """Integer marginal-constraint matrix in orbit coordinates.

    Row ``(axis, symbol)`` counts how many triples of each orbit carry
    ``symbol`` on ``axis``.
    """
    rows = []
    for axis, alph in enumerate(S.alphabets):
        pos = {a: i for i, a in enumerate(alph)}
        block = [[0] * orb.orbit_count for _ in alph]
        for s, o in zip(S.triples, orb.orbit_id):
            block[pos[s[axis]]][int(o)] += 1
        rows.extend(block)
    return rows


def rational_nullspace(M: list[list[int]], ncols: int) -> list[list[Fraction]]:
    """Exact null-space basis of an integer matrix via sparse Gauss-Jordan.

    Returns one vector per free column, with a 1 in that column.
    """
    rows = []
    for r in M:
        d = {j: Fraction(x) for j, x in enumerate(r) if x}
        if d:
            rows.append(d)
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        for p, prow in pivots.items():
            f = row.get(p)
            if f:
                for j, x in prow.items():
                    y = row.get(j, 0) - f * x
                    if y:
                        row[j] = y
                    else:
                        row.pop(j, None)
        if not row:
            continue
        p = min(row)
        inv = 1 / row[p]
        row = {j: x * inv for j, x in row.items()}
        for q, qrow in pivots.items():
            f = qrow.get(p)
            if f:
                for j, x in row.items():
                    y = qrow.get(j, 0) - f * x
                    if y:
                        qrow[j] = y
                    else:
                        qrow.pop(j, None)
        pivots[p] = row
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for p, prow in pivots.items():
            x = prow.get(fcol)
            if x:
                v[p] = -x
        basis.append(v)
    return basis


def kernel_basis(S: Support, G: SymmetryGroup) -> KernelBasis:
    """Exact basis of the compatibility kernel F_0(S, G).

    Solves the orbit-level marginal constraints over the rationals, lifts
    each solution to S and scales it to coprime integers.  The resulting
    column count is the compatibility degree chi(S, G).
    """
    orb = orbits(S, G)
    M = orbit_constraint_matrix(S, orb)
    null = rational_nullspace(M, orb.orbit_count)
    cols = []
    for v in null:
        den = lcm(*(x.denominator for x in v))
        ints = [int(x * den) for x in v]
        lifted = [ints[int(o)] for o in orb.orbit_id]
        g = 0
        for x in lifted:
            g = gcd(g, x)
        lifted = [x // g for x in lifted]
        first = next(x for x in lifted if x)
        if first < 0:
            lifted = [-x for x in lifted]
        cols.append(lifted)
    R = np.array(cols, dtype=np.int64).T.reshape(len(S), len(cols))
    _check_kernel(S, R)
    return KernelBasis(R, len(cols), orb.orbit_count)


def _check_kernel(S: Support, R: np.ndarray) -> None:
    # exact integer checks: zero marginals and zero column sums
    arr = S.array()
    for j in range(R.shape[1]):
        col = R[:, j]
        if int(col.sum()) != 0:
            raise AssertionError("kernel column does not sum to zero")
        for axis, alph in enumerate(S.alphabets):
            for a in alph:
                if int(col[arr[:, axis] == a].sum()) != 0:
                    raise AssertionError("kernel column has a nonzero marginal")


def tight_simplex(d: int) -> Support:
    """All nonnegative integer triples summing to ``d``."""
    return make_support((a, b, d - a - b) for a in range(d + 1) for b in range(d + 1 - a))
