"""Probability distributions on supports, their marginals and the Psi objective.

All logarithms are natural.  Zero-mass entries are skipped, so they add
nothing to entropies or to the expected log value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .support import Support, SupportError, SymmetryGroup, Triple

NORM_TOL = 1e-12


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    """Dense probability vector aligned with ``support.triples``."""

    support: Support
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.support),):
            raise DistributionError(f"expected {len(self.support)} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DistributionError("weights must be finite and nonnegative")
        total = w.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise DistributionError(f"weights sum to {total!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def normalized(cls, support: Support, weights) -> "Distribution":
        """Rescale nonnegative weights to unit mass."""
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0):
            raise DistributionError("negative weight")
        total = w.sum()
        if not total > 0:
            raise DistributionError("weights have zero total mass")
        return cls(support, w / total)

    @classmethod
    def from_mapping(cls, support: Support, weights: Mapping, normalize: bool = False) -> "Distribution":
        w = np.zeros(len(support))
        for s, p in weights.items():
            w[support.index(s)] = p
        return cls.normalized(support, w) if normalize else cls(support, w)

    @classmethod
    def uniform(cls, support: Support) -> "Distribution":
        return cls(support, np.full(len(support), 1.0 / len(support)))

    @classmethod
    def point_mass(cls, support: Support, s: Sequence[int]) -> "Distribution":
        w = np.zeros(len(support))
        w[support.index(s)] = 1.0
        return cls(support, w)

    def __getitem__(self, s) -> float:
        return float(self.weights[self.support.index(s)])

    def as_dict(self) -> dict[Triple, float]:
        return {s: float(p) for s, p in zip(self.support.triples, self.weights)}


@dataclass(frozen=True)
class MarginalVector:
    """Mass of each symbol on one axis (axes are numbered 0, 1, 2)."""

    axis: int
    symbols: tuple[int, ...]
    values: np.ndarray

    def as_dict(self) -> dict[int, float]:
        return {a: float(x) for a, x in zip(self.symbols, self.values)}


def marginal(P: Distribution, axis: int) -> MarginalVector:
    S = P.support
    A = S.incidence()[axis]
    return MarginalVector(axis, S.alphabets[axis], A @ P.weights)


def marginals(P: Distribution) -> list[MarginalVector]:
    return [marginal(P, ax) for ax in range(3)]


def entropy_of(p: np.ndarray) -> float:
    """Shannon entropy of a nonnegative vector, skipping zeros."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def entropy(P: Distribution) -> float:
    return entropy_of(P.weights)


def compatible(P: Distribution, Q: Distribution, tol: float = NORM_TOL) -> bool:
    """True when the three marginals of ``P`` and ``Q`` agree within ``tol``."""
    if P.support.triples != Q.support.triples:
        raise SupportError("distributions live on different supports")
    for A in P.support.incidence():
        if np.max(np.abs(A @ P.weights - A @ Q.weights)) > tol:
            return False
    return True


def symmetrize(P: Distribution, G: SymmetryGroup) -> Distribution:
    """Average of ``P`` over the group, i.e. the projection onto G-invariant laws."""
    if G.n != len(P.support):
        raise SupportError("group acts on a support of a different size")
    w = np.zeros(len(P.support))
    for g in G.elements:
        w += P.weights[list(g)]
    return Distribution(P.support, w / G.order)


def log_value_vector(S: Support, logvals, required: np.ndarray | None = None) -> np.ndarray:
    """Align log values with ``S``.

    ``logvals`` may be an array in canonical order, a mapping from triples
    to floats, or any object with a ``get`` method (such as a value table).
    Missing entries become ``nan``; if ``required`` (a boolean mask) is
    given, a missing entry there raises :class:`KeyError`.
    """
    if isinstance(logvals, np.ndarray) or isinstance(logvals, (list, tuple)):
        v = np.asarray(logvals, dtype=float)
        if v.shape != (len(S),):
            raise DistributionError(f"expected {len(S)} log values, got shape {v.shape}")
    else:
        v = np.array([_lookup(logvals, s) for s in S.triples], dtype=float)
    if required is not None:
        bad = required & ~np.isfinite(v)
        if np.any(bad):
            s = S.triples[int(np.flatnonzero(bad)[0])]
            raise KeyError(f"no log value for {s}")
    return v


def _lookup(logvals, s):
    x = logvals.get(s)
    return np.nan if x is None else x


def psi_of(weights: np.ndarray, incidence: list[np.ndarray], v: np.ndarray) -> float:
    """Array form of Psi: mean marginal entropy plus expected log value."""
    pos = weights > 0
    lin = float(weights[pos] @ v[pos])
    return sum(entropy_of(A @ weights) for A in incidence) / 3.0 + lin


def psi(P: Distribution, logvals) -> float:
    """Psi(P) = sum_l H(P_l)/3 + sum_s P(s) logvals(s).

    Examples
    --------
    >>> from laserbound.support import make_support
    >>> S = make_support([(1, 1, 1)])
    >>> psi(Distribution.uniform(S), {(1, 1, 1): 2.5})
    2.5
    """
    S = P.support
    v = log_value_vector(S, logvals, required=P.weights > 0)
    return psi_of(P.weights, S.incidence(), v)
