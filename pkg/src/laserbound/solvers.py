"""Value lower bounds on a tight support.

Three routes produce a bound on ``log V`` from per-triple log values:

* :func:`algorithm_A` maximizes Psi over G-invariant distributions (a
  concave problem), then replaces the optimizer by the max-entropy law with
  the same marginals, which has zero entropy gap.
* :func:`algorithm_B` maximizes Psi over the G-invariant distributions whose
  logarithms are orthogonal to the compatibility kernel.  These are exactly
  the laws that are their own max-entropy point, so the gap vanishes.
* :func:`certify` evaluates ``Psi(P) - Gamma(P)`` for any given ``P``.

Every emitted bound is ``Psi(P) - Gamma`` where ``Gamma`` comes from a dual
certificate of the max-entropy problem, so the value is safe even when an
optimizer stops early.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.special import logsumexp

from .distributions import (
    Distribution,
    MarginalVector,
    entropy_of,
    log_value_vector,
    psi_of,
    symmetrize,
)
from .support import KernelBasis, Support, SupportError, SymmetryGroup, orbits


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets shared by all solvers.

    Parameters
    ----------
    grad_tol : float
        Target stationarity residual for the Psi maximization.
    marginal_tol : float
        Allowed marginal mismatch of the max-entropy solution.
    max_iters : int
        Newton iteration budget per stage.
    damping : float
        Fraction of the distance to the simplex boundary an interior step
        may cover, in ``(0, 1]``.
    restarts : int
        Number of seeded random starts used by :func:`algorithm_B` on top
        of the deterministic ones.
    rng_seed : int
        Seed for random starts.
    constraint_tol : float
        Feasibility threshold on the kernel log-constraints.
    barrier_min : float
        Final barrier weight of the interior-point Psi maximization.
    """

    grad_tol: float = 1e-12
    marginal_tol: float = 1e-12
    max_iters: int = 200
    damping: float = 0.99
    restarts: int = 2
    rng_seed: int = 0
    constraint_tol: float = 1e-9
    barrier_min: float = 1e-15

    def __post_init__(self):
        for name in ("grad_tol", "marginal_tol", "constraint_tol", "barrier_min"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iters < 1 or self.restarts < 0:
            raise ValueError("max_iters must be >= 1 and restarts >= 0")


DEFAULT_CONFIG = SolverConfig()


class SolverError(RuntimeError):
    """Non-convergence; carries the best iterate and its residual."""

    def __init__(self, message: str, best: Distribution | None = None, residual: float = math.nan):
        super().__init__(message)
        self.best = best
        self.residual = residual


@dataclass(frozen=True)
class BoundOutcome:
    """A certified lower bound on ``log V`` and the evidence behind it.

    ``log_bound`` always equals ``psi(q_hat) - gamma_value`` for the
    distribution actually certified (``q_hat``).
    """

    log_bound: float
    p_hat: Distribution
    q_hat: Distribution
    gamma_value: float
    kkt_residual: float
    feasible: bool
    method: str = "A"
    info: dict = field(default_factory=dict, compare=False)


# ----------------------------------------------------------------------
# Psi maximization (OPT1)


class _OrbitProblem:
    """Psi restricted to G-invariant laws, parametrized by orbit masses."""

    def __init__(self, S: Support, G: SymmetryGroup, v: np.ndarray):
        self.S = S
        self.orb = orbits(S, G)
        self.E = self.orb.averaging()
        self.A = S.incidence()
        self.C = [A @ self.E for A in self.A]
        reps = self.orb.representatives()
        vo = v[reps]
        if not np.allclose(v, vo[self.orb.orbit_id], rtol=1e-12, atol=1e-12):
            raise SupportError("log values are not invariant under the symmetry group")
        self.v = v
        self.vo = vo
        self.k = self.orb.orbit_count

    def f(self, w: np.ndarray) -> float:
        return sum(entropy_of(C @ w) for C in self.C) / 3.0 + float(self.vo @ w)

    def grad(self, w: np.ndarray) -> np.ndarray:
        """Orbit gradient; equals the per-triple stationarity quantity."""
        g = self.vo.copy()
        for C in self.C:
            m = C @ w
            # an empty symbol makes the gradient huge rather than infinite
            g -= C.T @ (1.0 + np.log(np.maximum(m, 1e-300))) / 3.0
        return g

    def neg_hess(self, w: np.ndarray, cols=None) -> np.ndarray:
        H = 0.0
        for C in self.C:
            Cc = C if cols is None else C[:, cols]
            m = Cc @ (w if cols is None else w[cols])
            keep = m > 0
            H = H + Cc[keep].T @ (Cc[keep] / m[keep, None])
        return H / 3.0

    def to_weights(self, w: np.ndarray) -> np.ndarray:
        P = self.E @ w
        return P / P.sum()


def _kkt_residual(prob: _OrbitProblem, w: np.ndarray) -> float:
    pos = w > 0
    g = prob.grad(w)
    lam = float(w[pos] @ g[pos]) / float(w[pos].sum())
    r = np.max(np.abs(g[pos] - lam))
    if np.any(~pos):
        r = max(r, float(np.max(g[~pos] - lam)))
    return float(max(r, 0.0))


def _eq_newton_step(H: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Solve ``H d - nu 1 = g``, ``1'd = 0`` (ascent step on the simplex)."""
    k = len(g)
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = H
    K[:k, k] = -1.0
    K[k, :k] = 1.0
    rhs = np.concatenate([g, [0.0]])
    try:
        sol = np.linalg.solve(K, rhs)
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:k]


def _barrier(prob: _OrbitProblem, w: np.ndarray, cfg: SolverConfig) -> tuple[np.ndarray, float]:
    """Primal log-barrier path following on the orbit simplex."""
    mu = 1.0
    ones = np.ones(prob.k)

    def phi(x, mu):
        if np.any(x <= 0):
            return np.inf
        return -prob.f(x) - mu * float(np.log(x).sum())

    while True:
        tight = mu <= cfg.barrier_min
        for _ in range(cfg.max_iters):
            g = -prob.grad(w) - mu / w
            H = prob.neg_hess(w) + np.diag(mu / w**2)
            try:
                L = np.linalg.cholesky(H)
                Hg = np.linalg.solve(L.T, np.linalg.solve(L, g))
                H1 = np.linalg.solve(L.T, np.linalg.solve(L, ones))
            except np.linalg.LinAlgError:
                Hg = np.linalg.lstsq(H, g, rcond=None)[0]
                H1 = np.linalg.lstsq(H, ones, rcond=None)[0]
            nu = -(ones @ Hg) / (ones @ H1)
            d = -(Hg + nu * H1)
            dec = -(g @ d)
            if dec / 2 < (1e-18 if tight else 1e-9):
                break
            t = 1.0
            neg = d < 0
            if np.any(neg):
                t = min(1.0, cfg.damping * float(np.min(-w[neg] / d[neg])))
            f0 = phi(w, mu)
            while phi(w + t * d, mu) > f0 - 0.25 * t * dec and t > 1e-20:
                t *= 0.5
            w = w + t * d
            w = np.maximum(w, 1e-300)
            w /= w.sum()
        if tight:
            return w, mu
        mu = max(mu * 0.1, cfg.barrier_min)


def _face_newton(prob: _OrbitProblem, x: np.ndarray, idx: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Equality-constrained Newton ascent on the orbits ``idx``; others stay fixed."""
    best = math.inf
    stalls = 0
    for _ in range(cfg.max_iters):
        g = prob.grad(x)[idx]
        lam = float(x[idx] @ g) / float(x[idx].sum())
        r = float(np.max(np.abs(g - lam)))
        if r <= 0.1 * cfg.grad_tol:
            break
        # stop once rounding noise dominates
        stalls = stalls + 1 if r >= 0.5 * best else 0
        best = min(best, r)
        if stalls >= 3:
            break
        H = prob.neg_hess(x, idx)
        d = _eq_newton_step(H, g)
        slope = float((g - lam) @ d)
        if not slope > 0:
            break
        t = 1.0
        neg = d < 0
        if np.any(neg):
            t = min(1.0, cfg.damping * float(np.min(-x[idx][neg] / d[neg])))
        f0 = prob.f(x)
        while t > 1e-16:
            y = x.copy()
            y[idx] = x[idx] + t * d
            if np.all(y[idx] > 0) and prob.f(y) >= f0 + 1e-4 * t * slope - 1e-15 * (1.0 + abs(f0)):
                break
            t *= 0.5
        else:
            break
        x = y
        x[idx] = np.maximum(x[idx], 0.0)
        x /= x.sum()
    return x


def _revive(prob: _OrbitProblem, x: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Give back mass to zeroed orbits whose gradient beats the multiplier.

    Such an orbit is usually the only carrier of some marginal symbol and
    has a stationary mass far below what the barrier can resolve.  Each one
    gets the mass solving its own stationarity equation, found by bisection
    in log space with the rest of the law held fixed.
    """
    x = x.copy()
    for _ in range(5):
        g = prob.grad(x)
        pos = x > 0
        lam = float(x[pos] @ g[pos]) / float(x[pos].sum())
        bad = np.flatnonzero(~pos & (g > lam + 0.1 * cfg.grad_tol))
        if bad.size == 0:
            break
        for o in bad:
            lo, hi = math.log(1e-300), 0.0
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                y = x.copy()
                y[o] = math.exp(mid)
                if prob.grad(y)[o] > lam:
                    lo = mid
                else:
                    hi = mid
            x[o] = math.exp(lo)
        x /= x.sum()
    return x


def _polish(prob: _OrbitProblem, w: np.ndarray, threshold: float, cfg: SolverConfig) -> np.ndarray | None:
    """Newton on the face of the simplex picked out by the barrier iterate.

    Orbits with ``w < threshold`` are set to zero; zeroed orbits that
    should carry mass are revived and the face is re-polished.  Returns
    ``None`` if the face turns out not to contain the optimum.
    """
    free = w >= threshold
    if not np.any(free):
        return None
    x = np.where(free, w, 0.0)
    x /= x.sum()
    for _ in range(3):
        idx = np.flatnonzero(x > 0)
        x = _face_newton(prob, x, idx, cfg)
        if np.any(x[idx] <= 0):
            return None
        y = _revive(prob, x, cfg)
        if np.array_equal(y > 0, x > 0):
            break
        x = y
    return x


def _opt1(S: Support, G: SymmetryGroup, v: np.ndarray, cfg: SolverConfig, init=None):
    prob = _OrbitProblem(S, G, v)
    if prob.k == 1:
        w = np.ones(1)
        return prob, w, 0.0
    if init is None:
        w0 = np.full(prob.k, 1.0 / prob.k)
    else:
        w0 = prob.E.T @ np.asarray(init, dtype=float) * prob.orb.sizes
        w0 = 0.5 * w0 / w0.sum() + 0.5 / prob.k
    w, mu = _barrier(prob, w0, cfg)
    best, best_r = w, _kkt_residual(prob, w)
    # inactive orbits sit near mu; an optimal mass can be small yet far above it
    for threshold in sorted({math.sqrt(mu), 1e3 * mu, 1e6 * mu}, reverse=True):
        x = _polish(prob, w, threshold, cfg)
        if x is not None:
            r = _kkt_residual(prob, x)
            if r < best_r:
                best, best_r = x, r
        if best_r <= 0.1 * cfg.grad_tol:
            break
    return prob, best, best_r


def solve_opt1(S: Support, G: SymmetryGroup, logvals, cfg: SolverConfig = DEFAULT_CONFIG,
               init: Distribution | None = None) -> Distribution:
    """Maximize Psi over G-invariant distributions on ``S``.

    Uses a primal interior-point method on orbit masses followed by a
    Newton polish on the optimal face.  The optimizer is unique up to moves
    that preserve all marginals.

    Raises
    ------
    SolverError
        If the stationarity residual stays above ``cfg.grad_tol``.
    """
    v = log_value_vector(S, logvals, required=np.ones(len(S), bool))
    prob, w, r = _opt1(S, G, v, cfg, None if init is None else init.weights)
    P = Distribution.normalized(S, prob.to_weights(w))
    if r > cfg.grad_tol:
        raise SolverError(f"stationarity residual {r:.3g} above {cfg.grad_tol:.3g}", P, r)
    return P


def opt1_residual(S: Support, G: SymmetryGroup, logvals, P: Distribution) -> float:
    """Stationarity residual of ``P`` for the Psi maximization."""
    v = log_value_vector(S, logvals, required=np.ones(len(S), bool))
    prob = _OrbitProblem(S, G, v)
    w = prob.E.T @ P.weights * prob.orb.sizes
    return _kkt_residual(prob, w)


# ----------------------------------------------------------------------
# max-entropy with fixed marginals (OPT2)


def _lse(z: np.ndarray) -> float:
    c = float(np.max(z))
    return c + math.log(float(np.exp(z - c).sum()))


@dataclass
class _MaxEnt:
    weights: np.ndarray
    dual: float  # upper bound on the max entropy over the fiber
    residual: float


def _maxent(S: Support, targets: list[np.ndarray], cfg: SolverConfig) -> _MaxEnt:
    """Dual Newton on ``g(u) = logsumexp(B u) - <u, m>``.

    For every ``u``, ``g(u)`` bounds the fiber's max entropy from above,
    which is what makes the entropy gap certifiable.
    """
    A = S.incidence()
    keep = np.ones(len(S), dtype=bool)
    for Al, t in zip(A, targets):
        zero = np.asarray(t) <= 0
        if np.any(zero):
            keep &= ~(Al[zero].sum(axis=0) > 0)
    if not np.any(keep):
        raise SolverError("targets leave no admissible triple")
    m = np.concatenate([np.asarray(t, dtype=float) for t in targets])
    B = np.vstack(A).T[keep]
    u = np.zeros(B.shape[1])

    def dual(u):
        return _lse(B @ u) - float(u @ m)

    def resid(u):
        z = B @ u
        Q = np.exp(z - _lse(z))
        return Q, B.T @ Q - m

    gval = dual(u)
    Q, grad = resid(u)
    rnorm = float(np.max(np.abs(grad)))
    for _ in range(cfg.max_iters):
        if rnorm <= 0.01 * cfg.marginal_tol:
            break
        BQ = B.T @ Q
        Hs = B.T @ (B * Q[:, None]) - np.outer(BQ, BQ)
        d = -np.linalg.lstsq(Hs, grad, rcond=1e-14)[0]
        slope = float(grad @ d)
        if not slope < 0:
            d, slope = -grad, -float(grad @ grad)
        t = 1.0
        noise = 1e-13 * max(1.0, abs(gval))
        while t > 1e-12:
            un = u + t * d
            gn = dual(un)
            if gn <= gval + 1e-4 * t * slope:
                break
            if gn <= gval + noise:
                # function differences are rounding noise; fall back on the residual
                Qn, gradn = resid(un)
                if np.max(np.abs(gradn)) < rnorm:
                    break
            t *= 0.5
        else:
            break
        u = un
        gval = gn
        Q, grad = resid(u)
        rnorm = float(np.max(np.abs(grad)))
    full = np.zeros(len(S))
    full[keep] = Q
    return _MaxEnt(full, gval, rnorm)


def solve_opt2(S: Support, targets: list[MarginalVector] | list[np.ndarray],
               G: SymmetryGroup | None = None, cfg: SolverConfig = DEFAULT_CONFIG) -> Distribution:
    """Max-entropy distribution on ``S`` with the given three marginals.

    ``G`` is accepted for interface symmetry; the solution is unique, so it
    inherits any symmetry of the targets without being imposed.

    Raises
    ------
    SolverError
        If the marginal mismatch stays above ``cfg.marginal_tol``.
    """
    arrs = [t.values if isinstance(t, MarginalVector) else np.asarray(t, float) for t in targets]
    for ax, t in enumerate(arrs):
        if len(t) != len(S.alphabets[ax]):
            raise SupportError(f"target on axis {ax} has the wrong length")
    me = _maxent(S, arrs, cfg)
    Q = Distribution.normalized(S, me.weights)
    if me.residual > cfg.marginal_tol:
        raise SolverError(f"marginal mismatch {me.residual:.3g} above {cfg.marginal_tol:.3g}", Q, me.residual)
    return Q


def _gap(S: Support, w: np.ndarray, cfg: SolverConfig) -> tuple[float, _MaxEnt]:
    targets = [A @ w for A in S.incidence()]
    me = _maxent(S, targets, cfg)
    return max(0.0, me.dual - entropy_of(w)), me


def gamma(S: Support, P: Distribution, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Entropy gap ``Gamma_S(P)``: max entropy over P's fiber minus ``H(P)``.

    The fiber maximum is taken from the dual objective, so the returned
    value is an upper bound on the gap even before full convergence.
    """
    if P.support.triples != S.triples:
        raise SupportError("distribution lives on a different support")
    return _gap(S, P.weights, cfg)[0]


# ----------------------------------------------------------------------
# bounds


def _require_tight(S: Support) -> None:
    if not S.is_tight:
        raise SupportError("support is not tight")


def certify(S: Support, P: Distribution, logvals, cfg: SolverConfig = DEFAULT_CONFIG) -> BoundOutcome:
    """Bound ``log V >= Psi(P) - Gamma(P)`` for an arbitrary distribution.

    ``feasible`` reports whether the gap is below ``cfg.constraint_tol``.
    """
    _require_tight(S)
    if P.support.triples != S.triples:
        raise SupportError("distribution lives on a different support")
    v = log_value_vector(S, logvals, required=P.weights > 0)
    g, me = _gap(S, P.weights, cfg)
    value = psi_of(P.weights, S.incidence(), v) - g
    Q = Distribution.normalized(S, me.weights)
    return BoundOutcome(value, P, P, g, math.nan, g <= cfg.constraint_tol, "certify",
                        {"maxent": Q, "maxent_residual": me.residual})


def algorithm_A(S: Support, G: SymmetryGroup, logvals, cfg: SolverConfig = DEFAULT_CONFIG,
                init: Distribution | None = None) -> BoundOutcome:
    """Maximize Psi, then re-center on the max-entropy law with the same marginals.

    The returned ``log_bound`` is ``Psi(Q) - Gamma(Q)`` with ``Gamma(Q)``
    certified from the dual, which is zero up to rounding.
    """
    _require_tight(S)
    v = log_value_vector(S, logvals, required=np.ones(len(S), bool))
    prob, w, kkt = _opt1(S, G, v, cfg, None if init is None else init.weights)
    P = Distribution.normalized(S, prob.to_weights(w))
    targets = [A @ P.weights for A in prob.A]
    me = _maxent(S, targets, cfg)
    Q = Distribution.normalized(S, me.weights)
    g, _ = _gap(S, Q.weights, cfg)
    value = psi_of(Q.weights, prob.A, v) - g
    return BoundOutcome(value, P, Q, g, kkt, True, "A", {"maxent_residual": me.residual})


class _ExpFamily:
    """Psi on ``P = softmax(U theta)`` where ``U`` spans the admissible logs.

    The span consists of G-invariant functions orthogonal to every kernel
    column (and to constants, which softmax ignores).
    """

    def __init__(self, S: Support, G: SymmetryGroup, kernel: KernelBasis, v: np.ndarray):
        orb = orbits(S, G)
        M = np.zeros((len(S), orb.orbit_count))
        M[np.arange(len(S)), orb.orbit_id] = 1.0
        cons = np.vstack([kernel.R.T.astype(float) @ M, orb.sizes[None, :].astype(float)])
        N = null_space(cons)
        self.U, _ = np.linalg.qr(M @ N)
        self.A = S.incidence()
        self.v = v
        self.p = self.U.shape[1]

    def weights(self, th):
        z = self.U @ th
        return np.exp(z - logsumexp(z))

    def value(self, th) -> float:
        return psi_of(self.weights(th), self.A, self.v)

    def derivs(self, th):
        P = self.weights(th)
        ms = [A @ P for A in self.A]
        g = self.v - 1.0
        for A, m in zip(self.A, ms):
            g = g - A.T @ np.log(np.maximum(m, 1e-300)) / 3.0
        gb = g - P @ g
        pg = P * gb
        grad = self.U.T @ pg
        JU = P[:, None] * self.U - np.outer(P, P @ self.U)
        H = np.zeros((self.p, self.p))
        for A, m in zip(self.A, ms):
            X = A @ JU
            H -= X.T @ (X / np.maximum(m, 1e-300)[:, None]) / 3.0
        PU = P @ self.U
        pgU = pg @ self.U
        H += self.U.T @ (pg[:, None] * self.U) - np.outer(PU, pgU) - np.outer(pgU, PU)
        return psi_of(P, self.A, self.v), grad, H

    def start(self, P0: np.ndarray) -> np.ndarray:
        z = np.log(np.maximum(P0, 1e-40))
        return self.U.T @ (z - z.mean())

    def ascend(self, th: np.ndarray, cfg: SolverConfig):
        f, g, H = self.derivs(th)
        it = 0
        for it in range(cfg.max_iters):
            lam, V = np.linalg.eigh(-H)
            lam = np.maximum(np.abs(lam), 1e-10 * max(1.0, float(np.max(np.abs(lam)))))
            d = V @ ((V.T @ g) / lam)
            slope = float(g @ d)
            if slope < 1e-24 or np.max(np.abs(g)) < 1e-15:
                break
            t = 1.0
            while t > 1e-14:
                fn = self.value(th + t * d)
                if fn >= f + 1e-4 * t * slope:
                    break
                t *= 0.5
            else:
                break
            th = th + t * d
            f, g, H = self.derivs(th)
        return th, f, float(np.max(np.abs(g))), it


def constraint_residual(kernel: KernelBasis, P: Distribution) -> float:
    """Largest violation of ``sum_s R[s, j] log P(s) = 0``; ``inf`` if a touched row is zero."""
    if kernel.chi == 0:
        return 0.0
    touched = kernel.touched_rows()
    w = P.weights
    if np.any(w[touched] <= 0):
        return math.inf
    logs = np.zeros_like(w)
    logs[touched] = np.log(w[touched])
    return float(np.max(np.abs(kernel.R.T.astype(float) @ logs)))


def algorithm_B(S: Support, G: SymmetryGroup, logvals, kernel: KernelBasis,
                cfg: SolverConfig = DEFAULT_CONFIG,
                warm_starts: list[Distribution] | tuple = ()) -> BoundOutcome:
    """Maximize Psi over the laws satisfying the kernel log-constraints.

    The constraint set is parametrized exactly as an exponential family and
    explored by a modified Newton method from several starts: the
    Algorithm A output, the uniform law, any ``warm_starts`` and
    ``cfg.restarts`` seeded random laws.  The best certified
    ``Psi - Gamma`` is returned.
    """
    _require_tight(S)
    v = log_value_vector(S, logvals, required=np.ones(len(S), bool))
    base = algorithm_A(S, G, v, cfg)
    if kernel.chi == 0:
        return BoundOutcome(base.log_bound, base.p_hat, base.q_hat, base.gamma_value,
                            base.kkt_residual, True, "B", dict(base.info))
    if kernel.R.shape[0] != len(S):
        raise SupportError("kernel basis does not match the support")
    fam = _ExpFamily(S, G, kernel, v)
    rng = np.random.default_rng(cfg.rng_seed)
    starts = [("A", base.q_hat.weights), ("uniform", np.full(len(S), 1.0 / len(S)))]
    for i, P0 in enumerate(warm_starts):
        starts.append((f"warm{i}", symmetrize(P0, G).weights if P0.support.triples == S.triples
                       else _raise_support()))
    orb = orbits(S, G)
    for i in range(cfg.restarts):
        wo = rng.dirichlet(np.ones(orb.orbit_count))
        starts.append((f"random{i}", orb.averaging() @ wo))

    best = None
    for label, P0 in starts:
        th, f, gnorm, it = fam.ascend(fam.start(P0), cfg)
        P = Distribution.normalized(S, fam.weights(th))
        g, me = _gap(S, P.weights, cfg)
        value = psi_of(P.weights, fam.A, v) - g
        if best is None or value > best[0]:
            best = (value, P, g, gnorm, label, it, me)
    # Algorithm A's re-centered law is always admissible, so never do worse
    if base.log_bound > best[0]:
        return BoundOutcome(base.log_bound, base.p_hat, base.q_hat, base.gamma_value, base.kkt_residual,
                            constraint_residual(kernel, base.q_hat) <= cfg.constraint_tol, "B",
                            {"start": "A-fallback"})
    value, P, g, gnorm, label, it, me = best
    res = constraint_residual(kernel, P)
    return BoundOutcome(value, P, P, g, gnorm, res <= cfg.constraint_tol, "B",
                        {"start": label, "iterations": it, "constraint_residual": res,
                         "maxent_residual": me.residual})


def _raise_support():
    raise SupportError("warm start lives on a different support")
