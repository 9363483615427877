"""Recursive analysis of the powers ``t^(2^r)`` of a seed tensor.

The support of ``t^(2^r)`` is the set of pairwise sums of the support at
level ``r-1``.  Grouping the square by sums gives, for each target
``(a, b, c)``, a component whose own support is::

    S_abc = {s in S_prev : (a, b, c) - s in S_prev}

with log values ``prev(s) + prev(target - s)`` and the reflection
``s -> target - s`` as a symmetry.  Component values are solved level by
level (boundary components use closed forms), and the last table feeds
one global problem on the level-``r`` support.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .constructions import ConstructionSpec
from .distributions import Distribution, log_value_vector
from .solvers import (
    DEFAULT_CONFIG,
    BoundOutcome,
    SolverConfig,
    algorithm_A,
    algorithm_B,
    certify,
)
from .support import (
    Support,
    SupportError,
    SymmetryGroup,
    Triple,
    induced_group,
    kernel_basis,
    make_support,
    mirror_group,
)

log = logging.getLogger(__name__)

ALGORITHMS = ("A", "B", "hybrid")
HYBRID_B_LEVELS = 3


@dataclass(frozen=True)
class ValueTable:
    """Log lower bounds on the component values at one level and one rho."""

    rho: float
    level: int
    entries: dict

    def __getitem__(self, s) -> float:
        return self.entries[tuple(s)]

    def get(self, s, default=None):
        return self.entries.get(tuple(s), default)

    def __contains__(self, s) -> bool:
        return tuple(s) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def keys(self):
        return self.entries.keys()


@dataclass(frozen=True)
class ComponentProblem:
    """One component of the square of the previous level."""

    target: Triple
    support: Support
    group: SymmetryGroup
    logvals: np.ndarray | None = None


@dataclass(frozen=True)
class ComponentRecord:
    """How the value of one interior component was certified."""

    target: Triple
    level: int
    support: Support
    distribution: Distribution
    log_value: float
    method: str
    gamma: float = 0.0
    kkt_residual: float = math.nan
    feasible: bool = True
    error: str | None = None


@dataclass
class PowerAnalysis:
    """Result of :func:`analyze_power`; unpacks as ``(table, outcome)``."""

    spec: ConstructionSpec
    r: int
    rho: float
    algorithm: str
    tables: list[ValueTable]
    components: list[ComponentRecord]
    support: Support
    outcome: BoundOutcome
    timings: dict = field(default_factory=dict)

    @property
    def table(self) -> ValueTable:
        return self.tables[-1]

    @property
    def log_bound(self) -> float:
        return self.outcome.log_bound

    def __iter__(self):
        return iter((self.table, self.outcome))

    def component(self, target) -> ComponentRecord:
        rep = self.spec.orbit_representative(tuple(target))
        for rec in self.components:
            if rec.target == rep:
                return rec
        raise KeyError(f"no solved component {tuple(target)}")


def product_support(S1: Support, S2: Support) -> Support:
    """Support of the tensor product: all componentwise sums."""
    if not (S1.is_tight and S2.is_tight):
        raise SupportError("product_support needs tight inputs")
    a1, a2 = S1.array(), S2.array()
    sums = (a1[:, None, :] + a2[None, :, :]).reshape(-1, 3)
    return make_support(map(tuple, np.unique(sums, axis=0).tolist()))


@lru_cache(maxsize=None)
def _power_support_cached(name: str, q: int, base: tuple, r: int) -> Support:
    S = make_support(base)
    for _ in range(r):
        S = product_support(S, S)
    return S


def power_support(spec: ConstructionSpec, r: int) -> Support:
    """Support of ``t^(2^r)``."""
    return _power_support_cached(spec.name, spec.q, spec.base_support.triples, r)


def component_support(S_prev: Support, target) -> ComponentProblem:
    """Component ``target`` of the square of a tight support."""
    a, b, c = (int(x) for x in target)
    triples = [s for s in S_prev.triples if (a - s[0], b - s[1], c - s[2]) in S_prev]
    if not triples:
        raise SupportError(f"target {tuple(target)} is not reachable from the support")
    S = make_support(triples)
    return ComponentProblem((a, b, c), S, mirror_group(S, (a, b, c)))


def component_log_values(prev, problem: ComponentProblem) -> np.ndarray:
    """``prev(s) + prev(target - s)`` for each triple of the component."""
    a, b, c = problem.target
    out = np.empty(len(problem.support))
    for i, s in enumerate(problem.support.triples):
        x, y = prev.get(s), prev.get((a - s[0], b - s[1], c - s[2]))
        if x is None or y is None:
            raise KeyError(f"missing previous value around {s}")
        out[i] = x + y
    return out


def method_for_level(algorithm: str, k: int) -> str:
    """Solver used for the components of level ``k`` (``k >= 1``)."""
    if algorithm in ("A", "B"):
        return algorithm
    if algorithm == "hybrid":
        return "B" if k <= HYBRID_B_LEVELS else "A"
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def global_method(algorithm: str, r: int) -> str:
    return method_for_level(algorithm, max(r, 1))


def solve_problem(S: Support, G: SymmetryGroup, v: np.ndarray, method: str, cfg: SolverConfig,
                  warm: list[Distribution] = ()) -> BoundOutcome:
    """Run the requested algorithm; a single-triple support needs no solver."""
    if len(S) == 1:
        P = Distribution.uniform(S)
        return certify(S, P, v, cfg)
    if method == "A":
        return algorithm_A(S, G, v, cfg)
    if method == "B":
        return algorithm_B(S, G, v, kernel_basis(S, G), cfg, list(warm))
    raise ValueError(f"unknown method {method!r}")


def _solve_component(job):
    problem, level, method, cfg, warm = job
    try:
        out = solve_problem(problem.support, problem.group, problem.logvals, method, cfg, warm)
        P = out.q_hat
        return ComponentRecord(problem.target, level, problem.support, P, out.log_bound, out.method,
                               out.gamma_value, out.kkt_residual, out.feasible)
    except Exception as exc:  # noqa: BLE001 - any failure falls back to a certified value
        P = Distribution.uniform(problem.support)
        out = certify(problem.support, P, problem.logvals, cfg)
        return ComponentRecord(problem.target, level, problem.support, P, out.log_bound, "certify",
                               out.gamma_value, math.nan, out.feasible, error=f"{type(exc).__name__}: {exc}")


def base_table(spec: ConstructionSpec, rho: float) -> ValueTable:
    return ValueTable(rho, 0, {s: spec.base_log_value(s, rho) for s in spec.base_support.triples})


def _check_rho(rho: float) -> None:
    if not 2.0 <= rho <= 3.0:
        raise ValueError(f"rho must lie in [2, 3], got {rho}")


def next_level(spec: ConstructionSpec, prev: ValueTable, S_prev: Support, rho: float, method: str,
               cfg: SolverConfig, warm: list[Distribution] = (), workers: int = 1):
    """Value table of level ``prev.level + 1`` and the records of its solved components."""
    k = prev.level + 1
    S = product_support(S_prev, S_prev)
    entries: dict = {}
    jobs = []
    for t in S.triples:
        bval = spec.boundary_log_value(t, k, rho)
        if bval is not None:
            entries[t] = bval
            continue
        rep = spec.orbit_representative(t)
        if rep != t:
            continue
        problem = component_support(S_prev, t)
        problem = ComponentProblem(t, problem.support, problem.group, component_log_values(prev, problem))
        mine = [P for P in warm if P.support.triples == problem.support.triples]
        jobs.append((problem, k, method, cfg, mine))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_solve_component, jobs))
    else:
        records = [_solve_component(j) for j in jobs]
    values = {rec.target: rec.log_value for rec in records}
    for rec in records:
        if rec.error:
            log.warning("component %s at level %d fell back to a uniform certificate: %s",
                        rec.target, k, rec.error)
    for t in S.triples:
        if t not in entries:
            entries[t] = values[spec.orbit_representative(t)]
    return ValueTable(rho, k, entries), records, S


def analyze_power(spec: ConstructionSpec, r: int, rho: float, alg: str = "A",
                  cfg: SolverConfig = DEFAULT_CONFIG, warm_starts: list[Distribution] = (),
                  workers: int = 1, cache=None) -> PowerAnalysis:
    """Certified lower bound on ``log V_rho(t^(2^r))``.

    Parameters
    ----------
    spec : ConstructionSpec
    r : int
        Level; the tensor power is ``2**r``.
    rho : float
        Exponent parameter in ``[2, 3]``.
    alg : {"A", "B", "hybrid"}
        ``hybrid`` uses Algorithm B up to level 3 and Algorithm A above.
    warm_starts : list of Distribution
        Extra starting points for Algorithm B, matched to problems by support.
    workers : int
        Processes used for the independent components of a level.
    cache : ValueTableCache, optional
        Stores and reuses solved levels.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    _check_rho(rho)
    method_for_level(alg, 1)
    timings = {}
    table = base_table(spec, rho)
    S = spec.base_support
    tables = [table]
    components: list[ComponentRecord] = []
    for k in range(1, r + 1):
        t0 = time.perf_counter()
        method = method_for_level(alg, k)
        hit = cache.load(spec, rho, k, alg) if cache is not None else None
        if hit is not None:
            table, records = hit
            S = power_support(spec, k)
        else:
            table, records, S = next_level(spec, table, S, rho, method, cfg, warm_starts, workers)
            if cache is not None:
                cache.store(spec, rho, k, alg, table, records)
        tables.append(table)
        components.extend(records)
        timings[f"level{k}"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    G = induced_group(S, spec.symmetry)
    v = log_value_vector(S, table, required=np.ones(len(S), bool))
    warm = [P for P in warm_starts if P.support.triples == S.triples]
    outcome = solve_problem(S, G, v, global_method(alg, r), cfg, warm)
    timings["global"] = time.perf_counter() - t0
    return PowerAnalysis(spec, r, rho, alg, tables, components, S, outcome, timings)
