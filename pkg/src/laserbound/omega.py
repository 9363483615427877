"""From value bounds to bounds on the matrix multiplication exponent.

If ``V_rho(t^(m)) >= R^m`` where ``R`` is the border rank of the seed, then
``omega <= rho``.  Comparisons are made in log space after subtracting a
declared safety margin from the computed bound.
"""

from __future__ import annotations

import datetime as _dt
import json
import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal

import numpy as np
from scipy.optimize import brentq

from . import __version__
from .constructions import ConstructionSpec, get_construction
from .distributions import Distribution
from .power import (
    PowerAnalysis,
    analyze_power,
    component_log_values,
    component_support,
    power_support,
)
from .reporting import (
    SCHEMA,
    FormatError,
    config_from_json,
    config_to_json,
    fmt,
    parse_float,
    record_to_json,
)
from .solvers import DEFAULT_CONFIG, SolverConfig, certify

log = logging.getLogger(__name__)

DEFAULT_MARGIN = 1e-9
SUPPORTED_POWERS = (1, 2, 4, 8, 16, 32)


class NonCertifyingError(RuntimeError):
    """The construction and power cannot certify any exponent below 3."""


class CertificateError(ValueError):
    """A certificate is malformed or inconsistent with regenerated data."""


def level_of(power: int) -> int:
    r = int(round(math.log2(power))) if power >= 1 else -1
    if power < 1 or 2**r != power:
        raise ValueError(f"power must be a power of two, got {power}")
    return r


def value_bound(spec: ConstructionSpec, r: int, rho: float, alg: str = "A",
                cfg: SolverConfig = DEFAULT_CONFIG, **kwargs) -> float:
    """Certified lower bound on ``log V_rho(t^(2^r))``."""
    return analyze_power(spec, r, rho, alg, cfg, **kwargs).log_bound


@dataclass
class OmegaResult:
    """Outcome of the exponent search.

    ``omega`` is a grid point at which the bound was verified to clear the
    threshold; ``lo = omega - rho_tol`` is where it was verified to fail
    (``None`` when ``omega`` is 2).
    """

    omega: float
    lo: float | None
    rho_tol: float
    analysis: PowerAnalysis
    evaluations: list = field(default_factory=list)
    monotone: bool = True


def _grid(k: int, tol: float) -> float:
    return float(Decimal(k) * Decimal(repr(tol)))


def omega_search(spec: ConstructionSpec, r: int, alg: str = "A", cfg: SolverConfig = DEFAULT_CONFIG,
                 rho_tol: float = 1e-7, margin: float = DEFAULT_MARGIN, **kwargs) -> OmegaResult:
    """Smallest point of the ``rho_tol`` grid whose bound clears the threshold.

    A bracketing root finder locates the crossing of
    ``bound(rho) - margin - threshold``; the grid points on either side are
    then evaluated explicitly.  The returned exponent is sound on its own
    (it was certified directly).  Its minimality relies on the bound being
    nondecreasing in rho, which is checked on all evaluated points.
    """
    threshold = spec.threshold(r)
    cache: dict[float, PowerAnalysis] = {}

    def f(rho: float) -> float:
        if rho not in cache:
            cache[rho] = analyze_power(spec, r, rho, alg, cfg, **kwargs)
        return cache[rho].log_bound - margin - threshold

    if f(3.0) < 0:
        raise NonCertifyingError(
            f"{spec.name} (q={spec.q}) at power {2**r}: bound at rho=3 is "
            f"{cache[3.0].log_bound:.10g} < threshold {threshold:.10g}")
    if f(2.0) >= 0:
        return OmegaResult(2.0, None, rho_tol, cache[2.0], _evals(cache, margin, threshold))
    x0 = brentq(f, 2.0, 3.0, xtol=rho_tol / 16, rtol=1e-15)
    k = math.ceil(x0 / rho_tol - 1e-9)
    while f(_grid(k, rho_tol)) < 0:
        k += 1
    while k > 2.0 / rho_tol and f(_grid(k - 1, rho_tol)) >= 0:
        k -= 1
    hi, lo = _grid(k, rho_tol), _grid(k - 1, rho_tol)
    evals = _evals(cache, margin, threshold)
    gaps = [b for _, b in evals]
    monotone = all(b2 >= b1 - 1e-9 for b1, b2 in zip(gaps, gaps[1:]))
    if not monotone:
        log.warning("bound is not monotone in rho over the evaluated points; minimality is not guaranteed")
    return OmegaResult(hi, lo, rho_tol, cache[hi], evals, monotone)


def _evals(cache, margin, threshold):
    return sorted((rho, pa.log_bound - margin - threshold) for rho, pa in cache.items())


def omega_upper(spec: ConstructionSpec, r: int, alg: str = "A", cfg: SolverConfig = DEFAULT_CONFIG,
                rho_tol: float = 1e-7, **kwargs) -> float:
    """Certified upper bound on omega from the ``2**r``-th power."""
    return omega_search(spec, r, alg, cfg, rho_tol, **kwargs).omega


# ----------------------------------------------------------------------
# certificates


@dataclass
class BoundCertificate:
    """Everything needed to re-derive a value bound from scratch.

    Distributions are stored; the values derived from them are stored too
    but only for reporting, since verification recomputes them.
    """

    construction: str
    q: int
    power: int
    rho: float
    components: list
    global_distribution: list
    global_log_value: float
    threshold_log: float
    omega_claim: float | None
    margin: float
    config: dict
    seed: int
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "certificate",
            "construction": self.construction,
            "q": self.q,
            "power": self.power,
            "rho": fmt(self.rho),
            "components": self.components,
            "global": {"distribution": [fmt(p) for p in self.global_distribution],
                       "log_value": fmt(self.global_log_value)},
            "threshold_log": fmt(self.threshold_log),
            "omega_claim": None if self.omega_claim is None else fmt(self.omega_claim),
            "margin": fmt(self.margin),
            "config": self.config,
            "seed": self.seed,
            "metadata": self.metadata,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"

    @classmethod
    def from_json(cls, d: dict) -> "BoundCertificate":
        try:
            if d.get("schema") != SCHEMA or d.get("kind", "certificate") != "certificate":
                raise CertificateError(f"unsupported schema {d.get('schema')!r}")
            g = d["global"]
            claim = d.get("omega_claim")
            return cls(
                construction=str(d["construction"]),
                q=int(d["q"]),
                power=int(d["power"]),
                rho=parse_float(d["rho"]),
                components=list(d["components"]),
                global_distribution=[parse_float(x) for x in g["distribution"]],
                global_log_value=parse_float(g["log_value"]),
                threshold_log=parse_float(d["threshold_log"]),
                omega_claim=None if claim is None else parse_float(claim),
                margin=parse_float(d["margin"]),
                config=dict(d.get("config", {})),
                seed=int(d.get("seed", 0)),
                metadata=dict(d.get("metadata", {})),
            )
        except (KeyError, TypeError, FormatError) as exc:
            raise CertificateError(f"malformed certificate: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "BoundCertificate":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"invalid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise CertificateError("certificate must be a JSON object")
        return cls.from_json(d)


def certificate_from_analysis(pa: PowerAnalysis, cfg: SolverConfig = DEFAULT_CONFIG,
                              margin: float = DEFAULT_MARGIN, extra: dict | None = None) -> BoundCertificate:
    threshold = pa.spec.threshold(pa.r)
    ok = pa.log_bound - margin >= threshold
    meta = {
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
        "algorithm": pa.algorithm,
        "global_method": pa.outcome.method,
        "global_gamma": fmt(pa.outcome.gamma_value),
        "numpy": np.__version__,
    }
    meta.update(extra or {})
    return BoundCertificate(
        construction=pa.spec.name,
        q=pa.spec.q,
        power=2**pa.r,
        rho=pa.rho,
        components=[record_to_json(c) for c in pa.components],
        global_distribution=list(map(float, pa.outcome.q_hat.weights)),
        global_log_value=pa.log_bound,
        threshold_log=threshold,
        omega_claim=pa.rho if ok else None,
        margin=margin,
        config=config_to_json(cfg),
        seed=cfg.rng_seed,
        metadata=meta,
    )


@dataclass
class VerificationReport:
    """``status`` is ``VERIFIED``, ``NO-CLAIM`` or ``REJECTED``."""

    status: str
    log_bound: float
    threshold_log: float
    margin: float
    omega: float | None
    components: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "VERIFIED"

    @property
    def margin_log(self) -> float:
        return self.log_bound - self.margin - self.threshold_log


def _distribution(S, values, what: str, errors: list) -> Distribution | None:
    w = np.asarray(values, dtype=float)
    if w.shape != (len(S),):
        raise CertificateError(f"{what}: {len(w)} probabilities for {len(S)} triples")
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        errors.append(f"{what}: negative or non-finite probability")
        return None
    if abs(w.sum() - 1.0) > 1e-9:
        errors.append(f"{what}: probabilities sum to {w.sum():.12g}, not 1 (normalization error)")
        return None
    return Distribution.normalized(S, w)


def verify_certificate(cert: BoundCertificate, cfg: SolverConfig | None = None) -> VerificationReport:
    """Recompute every value in the certificate from its distributions.

    Supports are regenerated from the construction and compared with the
    stored ones; each component value is re-derived as ``Psi - Gamma`` from
    the previous level's recomputed values, and so is the global bound.
    Stored values are only compared, never used.

    Raises
    ------
    CertificateError
        On structural problems (unknown construction, support mismatch,
        missing component).
    """
    if cfg is None:
        cfg = config_from_json(cert.config) if cert.config else DEFAULT_CONFIG
    try:
        spec = get_construction(cert.construction, cert.q)
        r = level_of(cert.power)
    except ValueError as exc:
        raise CertificateError(str(exc)) from exc
    rho = cert.rho
    if not 2.0 <= rho <= 3.0:
        raise CertificateError(f"rho={rho} outside [2, 3]")
    errors: list[str] = []
    comps = {}
    for c in cert.components:
        try:
            comps[tuple(int(x) for x in c["abc"])] = c
        except (KeyError, TypeError, ValueError) as exc:
            raise CertificateError(f"malformed component entry: {exc}") from exc
    rows = []
    table = {s: spec.base_log_value(s, rho) for s in spec.base_support.triples}
    S_prev = spec.base_support
    for k in range(1, r + 1):
        S = power_support(spec, k)
        new = {}
        solved = {}
        for t in S.triples:
            b = spec.boundary_log_value(t, k, rho)
            if b is not None:
                new[t] = b
                continue
            rep = spec.orbit_representative(t)
            if rep in solved:
                new[t] = solved[rep]
                continue
            if rep not in comps:
                raise CertificateError(f"missing component {rep} at level {k}")
            c = comps[rep]
            problem = component_support(S_prev, rep)
            stored = [tuple(s) for s in c.get("support", [])]
            if stored != list(problem.support.triples):
                raise CertificateError(f"support of component {rep} does not match the regenerated support")
            v = component_log_values(table, problem)
            P = _distribution(problem.support, [parse_float(x) for x in c["distribution"]],
                              f"component {rep}", errors)
            if P is None:
                value = -math.inf
            else:
                value = certify(problem.support, P, v, cfg).log_bound
            claimed = parse_float(c.get("log_value", "nan"))
            rows.append({"abc": rep, "level": k, "claimed": claimed, "recomputed": value,
                         "residual": value - claimed})
            solved[rep] = value
            new[t] = value
        table = new
        S_prev = S
    S = power_support(spec, r)
    P = _distribution(S, cert.global_distribution, "global distribution", errors)
    if errors or P is None:
        return VerificationReport("REJECTED", -math.inf, cert.threshold_log, cert.margin, None, rows, errors)
    bound = certify(S, P, table, cfg).log_bound
    threshold = spec.threshold(r)
    if abs(threshold - cert.threshold_log) > 1e-12 * abs(threshold):
        errors.append("stored threshold does not match the construction")
    holds = bound - cert.margin >= threshold
    if cert.omega_claim is None:
        status = "NO-CLAIM"
    elif not holds:
        status = "REJECTED"
        errors.append(f"recomputed bound {bound:.17g} minus margin misses threshold {threshold:.17g}")
    elif cert.omega_claim < rho:
        status = "REJECTED"
        errors.append("claimed exponent is below the certified rho")
    else:
        status = "VERIFIED" if not errors else "REJECTED"
    return VerificationReport(status, bound, threshold, cert.margin, rho if status == "VERIFIED" else None,
                              rows, errors)


def published_certificate(construction: str, power: int, cfg: SolverConfig = DEFAULT_CONFIG,
                          alg: str = "hybrid", margin: float = DEFAULT_MARGIN) -> BoundCertificate:
    """Certificate whose global distribution is a shipped published table.

    Component distributions are produced by this package's solvers at the
    table's rho; the global law is the published one, renormalized.
    """
    from .reporting import load_published

    tab = load_published(construction, power)
    spec = tab.spec()
    pa = analyze_power(spec, tab.level, tab.rho, alg, cfg)
    S = power_support(spec, tab.level)
    P = tab.distribution()
    out = certify(S, P, pa.table, cfg)
    replay = PowerAnalysis(spec, tab.level, tab.rho, alg, pa.tables, pa.components, S, out)
    return certificate_from_analysis(replay, cfg, margin,
                                     {"global_source": f"published {construction} power {power} table",
                                      "raw_mass": fmt(tab.raw_mass())})
