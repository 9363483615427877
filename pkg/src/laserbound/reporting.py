"""JSON and CSV formats: certificates, cached value tables, published tables
and sweep rows.

Floats are written as decimal strings with 17 significant digits, which
round-trip every double exactly, so serialize -> parse -> serialize is the
identity.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .constructions import ConstructionSpec, get_construction
from .distributions import Distribution
from .power import ComponentRecord, ValueTable, power_support
from .solvers import SolverConfig
from .support import make_support

SCHEMA = 1
CACHE_ENV = "LASERBOUND_CACHE"


class FormatError(ValueError):
    """Malformed or schema-incompatible input file."""


def fmt(x: float) -> str:
    """17-significant-digit decimal string (``"inf"``/``"nan"`` spelled out)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def parse_float(s) -> float:
    if isinstance(s, bool) or not isinstance(s, (str, int, float)):
        raise FormatError(f"expected a number, got {s!r}")
    try:
        return float(s)
    except ValueError:
        raise FormatError(f"not a number: {s!r}") from None


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def config_to_json(cfg: SolverConfig) -> dict:
    return {k: (fmt(v) if isinstance(v, float) else v) for k, v in asdict(cfg).items()}


def config_from_json(d: dict) -> SolverConfig:
    fields = {}
    for k, v in d.items():
        if k not in SolverConfig.__dataclass_fields__:
            continue
        typ = SolverConfig.__dataclass_fields__[k].type
        fields[k] = parse_float(v) if typ in (float, "float") else int(v)
    return SolverConfig(**fields)


def record_to_json(rec: ComponentRecord) -> dict:
    return {
        "abc": list(rec.target),
        "level": rec.level,
        "method": rec.method,
        "support": [list(s) for s in rec.support.triples],
        "distribution": [fmt(p) for p in rec.distribution.weights],
        "log_value": fmt(rec.log_value),
        "gamma": fmt(rec.gamma),
        "kkt_residual": fmt(rec.kkt_residual),
        "feasible": bool(rec.feasible),
        "error": rec.error,
    }


def record_from_json(d: dict) -> ComponentRecord:
    S = make_support(tuple(s) for s in d["support"])
    w = np.array([parse_float(x) for x in d["distribution"]])
    return ComponentRecord(tuple(d["abc"]), int(d["level"]), S, Distribution.normalized(S, w),
                           parse_float(d["log_value"]), d.get("method", "?"), parse_float(d.get("gamma", 0)),
                           parse_float(d.get("kkt_residual", "nan")), bool(d.get("feasible", True)),
                           d.get("error"))


# ----------------------------------------------------------------------
# value-table cache


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "laserbound"


class ValueTableCache:
    """Directory of solved levels keyed by construction, q, rho, level and algorithm."""

    def __init__(self, root=None, cfg: SolverConfig | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.cfg = cfg

    def _path(self, spec: ConstructionSpec, rho: float, level: int, alg: str) -> Path:
        tag = ""
        if self.cfg is not None:
            tag = "_" + hashlib.sha1(json.dumps(config_to_json(self.cfg), sort_keys=True).encode()).hexdigest()[:8]
        return self.root / f"{spec.name}_q{spec.q}_rho{fmt(rho)}_L{level}_{alg}{tag}.json"

    def load(self, spec: ConstructionSpec, rho: float, level: int, alg: str):
        path = self._path(spec, rho, level, alg)
        if not path.exists():
            return None
        try:
            d = json.loads(path.read_text())
            if d.get("schema") != SCHEMA:
                return None
            entries = {tuple(e[:3]): parse_float(e[3]) for e in d["entries"]}
            table = ValueTable(parse_float(d["rho"]), int(d["level"]), entries)
            records = [record_from_json(c) for c in d["components"]]
        except (ValueError, KeyError, TypeError):
            return None
        if set(entries) != set(power_support(spec, level).triples):
            return None
        return table, records

    def store(self, spec: ConstructionSpec, rho: float, level: int, alg: str, table: ValueTable, records) -> None:
        d = {
            "schema": SCHEMA,
            "kind": "value_table",
            "construction": spec.name,
            "q": spec.q,
            "rho": fmt(rho),
            "level": level,
            "algorithm": alg,
            "entries": [[*s, fmt(v)] for s, v in sorted(table.entries.items())],
            "components": [record_to_json(r) for r in records],
        }
        atomic_write(self._path(spec, rho, level, alg), dumps(d))


# ----------------------------------------------------------------------
# published tables


@dataclass(frozen=True)
class PublishedTable:
    """A shipped table of published component values and distributions."""

    construction: str
    q: int
    power: int
    rho: float
    algorithm: str
    claimed_bound: float
    rows: tuple
    certified_column: str
    raw: dict

    @property
    def level(self) -> int:
        return int(round(math.log2(self.power)))

    def spec(self) -> ConstructionSpec:
        return get_construction(self.construction, self.q)

    def row(self, abc) -> dict:
        for r in self.rows:
            if tuple(r["abc"]) == tuple(abc):
                return r
        raise KeyError(abc)

    def values(self) -> dict:
        """Published component values (linear scale) by orbit representative."""
        return {tuple(r["abc"]): float(r["value"]) for r in self.rows}

    def log_values(self) -> dict:
        """Published values spread over the whole level support, in log scale."""
        spec = self.spec()
        vals = self.values()
        return {t: math.log(vals[spec.orbit_representative(t)]) for t in power_support(spec, self.level).triples}

    def distribution(self, column: str | None = None) -> Distribution:
        """Distribution on the full support from a per-triple column, renormalized.

        The printed digits do not sum exactly to one, hence the rescaling.
        """
        column = column or self.certified_column
        spec = self.spec()
        S = power_support(spec, self.level)
        by_rep = {tuple(r["abc"]): float(r[column]) for r in self.rows}
        w = np.array([by_rep[spec.orbit_representative(t)] for t in S.triples])
        return Distribution.normalized(S, w)

    def raw_mass(self, column: str | None = None) -> float:
        column = column or self.certified_column
        spec = self.spec()
        S = power_support(spec, self.level)
        by_rep = {tuple(r["abc"]): float(r[column]) for r in self.rows}
        return float(sum(by_rep[spec.orbit_representative(t)] for t in S.triples))


PUBLISHED = {
    ("cw", 4): "cw_power4_q5.json",
    ("cw", 8): "cw_power8_q5.json",
    ("asym", 4): "asym_power4_q3.json",
    ("asym", 8): "asym_power8_q3.json",
}


def load_published(construction: str, power: int) -> PublishedTable:
    """Load a shipped table by construction name and power."""
    try:
        name = PUBLISHED[(construction, power)]
    except KeyError:
        raise KeyError(f"no published table for {construction} power {power}") from None
    text = resources.files("laserbound").joinpath("data", name).read_text()
    return published_from_json(json.loads(text))


def published_from_json(d: dict) -> PublishedTable:
    return PublishedTable(d["construction"], int(d["q"]), int(d["power"]), float(d["rho"]), d["algorithm"],
                          float(d["claimed_bound"]), tuple(d["rows"]), d["certified_column"], d)


def load_warm_start(path) -> list[Distribution]:
    """Warm-start distributions from a published-table file or a certificate."""
    d = json.loads(Path(path).read_text())
    if "rows" in d:
        return [published_from_json(d).distribution()]
    if d.get("kind") == "certificate":
        spec = get_construction(d["construction"], int(d["q"]))
        level = int(round(math.log2(int(d["power"]))))
        S = power_support(spec, level)
        out = [Distribution.normalized(S, [parse_float(x) for x in d["global"]["distribution"]])]
        for c in d.get("components", []):
            out.append(record_from_json(c).distribution)
        return out
    raise FormatError(f"{path}: neither a published table nor a certificate")


# ----------------------------------------------------------------------
# sweep CSV

CSV_HEADER = ("rho", "log_bound", "threshold", "margin_linear")


@dataclass(frozen=True)
class SweepRow:
    """``margin_linear`` is ``V - R^(2^r)`` computed without cancellation."""

    rho: float
    log_bound: float
    threshold: float

    @property
    def margin_linear(self) -> float:
        return math.exp(self.threshold) * math.expm1(self.log_bound - self.threshold)

    @property
    def margin_log(self) -> float:
        return self.log_bound - self.threshold


def sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([fmt(r.rho), fmt(r.log_bound), fmt(r.threshold), format(r.margin_linear, ".6e")])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[SweepRow]:
    rdr = csv.reader(io.StringIO(text))
    header = next(rdr)
    if tuple(header) != CSV_HEADER:
        raise FormatError(f"unexpected CSV header {header}")
    return [SweepRow(float(a), float(b), float(c)) for a, b, c, _ in rdr]
