import math

import numpy as np
import pytest

from laserbound import power as power_mod
from laserbound.constructions import asym_construction, cw_construction
from laserbound.distributions import log_value_vector
from laserbound.power import (
    ComponentProblem,
    analyze_power,
    component_log_values,
    component_support,
    method_for_level,
    power_support,
    product_support,
)
from laserbound.reporting import ValueTableCache, load_published
from laserbound.support import SupportError, induced_group, make_support, tight_simplex


class TestProductSupport:
    def test_cw_square(self):
        spec = cw_construction(5)
        S = product_support(spec.base_support, spec.base_support)
        assert S.triples == tight_simplex(4).triples and len(S) == 15

    def test_asym_square(self):
        spec = asym_construction(3)
        S = product_support(spec.base_support, spec.base_support)
        box = {(a, b, c) for a in range(2, 5) for b in range(3) for c in range(3) if a + b + c == 4}
        assert set(S.triples) == box

    def test_identity(self):
        S = cw_construction(5).base_support
        assert product_support(S, make_support([(0, 0, 0)])).triples == S.triples

    def test_needs_tight(self):
        with pytest.raises(SupportError):
            product_support(make_support([(1, 0, 0), (2, 0, 0)]), make_support([(0, 0, 0)]))

    @pytest.mark.parametrize("r", range(6))
    def test_cw_cardinality(self, r):
        S = power_support(cw_construction(5), r)
        n = 2 ** (r + 1)
        assert len(S) == (n + 1) * (n + 2) // 2
        assert S.degree == 2 * 2**r
        assert S.b_bound <= 3 * 2**r

    @pytest.mark.parametrize("r", range(6))
    def test_asym_cardinality(self, r):
        S = power_support(asym_construction(3), r)
        n = 2**r
        assert len(S) == (n + 1) * (n + 2) // 2
        assert all(n <= a <= 2 * n and b <= n and c <= n for a, b, c in S.triples)
        assert S.degree == 2 * n


class TestComponents:
    def test_cw_211(self):
        prob = component_support(cw_construction(5).base_support, (2, 1, 1))
        assert set(prob.support.triples) == {(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)}
        assert prob.group.order == 2

    def test_asym_211(self):
        prob = component_support(asym_construction(3).base_support, (2, 1, 1))
        assert prob.support.triples == ((1, 0, 1), (1, 1, 0))

    def test_corner(self):
        S_prev = power_support(cw_construction(5), 2)
        prob = component_support(S_prev, (16, 0, 0))
        assert prob.support.triples == ((8, 0, 0),) and prob.group.is_trivial()

    def test_unreachable(self):
        with pytest.raises(SupportError):
            component_support(cw_construction(5).base_support, (5, 0, 0))

    def test_log_values(self):
        spec = cw_construction(6)
        rho = 2.3754770
        prev = {s: spec.base_log_value(s, rho) for s in spec.base_support.triples}
        prob = component_support(spec.base_support, (2, 1, 1))
        v = dict(zip(prob.support.triples, component_log_values(prev, prob)))
        L = rho / 3 * math.log(6)
        assert v[(1, 1, 0)] == pytest.approx(2 * L)
        assert v[(2, 0, 0)] == pytest.approx(L)

    def test_self_mirror(self):
        spec = cw_construction(5)
        prev = {s: spec.base_log_value(s, 2.5) for s in spec.base_support.triples}
        prob = component_support(spec.base_support, (2, 2, 0))
        v = dict(zip(prob.support.triples, component_log_values(prev, prob)))
        assert v[(1, 1, 0)] == 2 * prev[(1, 1, 0)]

    def test_missing_value(self):
        spec = cw_construction(5)
        prob = component_support(spec.base_support, (2, 1, 1))
        with pytest.raises(KeyError):
            component_log_values({(2, 0, 0): 0.0}, prob)

    @pytest.mark.parametrize("make,q", [(cw_construction, 5), (asym_construction, 3)])
    def test_mirror_invariance_of_values(self, make, q):
        spec = make(q)
        pa = analyze_power(spec, 2, 2.4, "A")
        S_prev = power_support(spec, 1)
        for t in power_support(spec, 2).triples:
            prob = component_support(S_prev, t)
            v = component_log_values(pa.tables[1], prob)
            for g in prob.group.elements:
                np.testing.assert_allclose(v[list(g)], v, atol=1e-12)

    @pytest.mark.parametrize("make,q", [(cw_construction, 5), (asym_construction, 3)])
    def test_tables_invariant_under_L(self, make, q):
        spec = make(q)
        pa = analyze_power(spec, 3, 2.4, "A")
        for k, table in enumerate(pa.tables):
            S = power_support(spec, k)
            G = induced_group(S, spec.symmetry)
            v = log_value_vector(S, table)
            for g in G.elements:
                np.testing.assert_allclose(v[list(g)], v, atol=1e-12)


class TestAnalyze:
    def test_power2(self):
        spec = cw_construction(6)
        pa = analyze_power(spec, 1, 2.3754770, "A")
        assert pa.log_bound > math.log(64)
        assert pa.log_bound >= math.log(64.00000357) - 1e-6
        assert math.exp(pa.table[(2, 1, 1)]) > 27.35608 * (1 - 1e-5)

    def test_power4_component_values(self):
        tab = load_published("cw", 4)
        pa = analyze_power(tab.spec(), 2, tab.rho, "A")
        assert math.exp(pa.table[(3, 3, 2)]) == pytest.approx(793.438218, rel=1e-5)
        for abc, value in tab.values().items():
            assert math.exp(pa.table[abc]) == pytest.approx(value, rel=1e-5), abc
        assert pa.log_bound >= math.log(2401.00013) - 1e-5

    def test_asym_power4(self):
        pa = analyze_power(asym_construction(3), 2, 2.44303, "A")
        assert math.exp(pa.table[(4, 2, 2)]) == pytest.approx(118.284967, rel=1e-6)
        assert pa.log_bound > math.log(256.00084 * (1 - 1e-5))

    def test_asym_power2(self):
        pa = analyze_power(asym_construction(3), 1, 2.44998, "A")
        assert pa.log_bound >= math.log(16.00002) - 1e-5

    def test_unpacks(self):
        pa = analyze_power(cw_construction(5), 1, 2.4)
        table, outcome = pa
        assert table is pa.table and outcome.log_bound == pa.log_bound
        assert pa.component((1, 2, 1)).target == (2, 1, 1)

    @pytest.mark.parametrize("q", [5, 6])
    def test_level_monotone(self, q):
        spec = cw_construction(q)
        prev = None
        for r in range(4):
            b = analyze_power(spec, r, 2.3729, "A").log_bound
            if prev is not None:
                assert b >= 2 * prev - 1e-8
            prev = b

    def test_rho_monotone(self):
        spec = asym_construction(3)
        bounds = [analyze_power(spec, 2, rho, "A").log_bound for rho in np.linspace(2.0, 3.0, 9)]
        assert all(b >= a - 1e-12 for a, b in zip(bounds, bounds[1:]))

    def test_bad_arguments(self):
        spec = cw_construction(5)
        with pytest.raises(ValueError):
            analyze_power(spec, 1, 3.5)
        with pytest.raises(ValueError):
            analyze_power(spec, -1, 2.5)
        with pytest.raises(ValueError):
            analyze_power(spec, 1, 2.5, "C")

    def test_method_for_level(self):
        assert [method_for_level("hybrid", k) for k in range(1, 6)] == ["B", "B", "B", "A", "A"]
        assert method_for_level("A", 3) == "A"

    def test_boundary_components_use_closed_form(self):
        spec = cw_construction(5)
        pa = analyze_power(spec, 2, 2.4, "A")
        for rec in pa.components:
            assert spec.boundary_index(rec.target, rec.level) is None

    def test_solver_failure_falls_back(self, monkeypatch):
        def boom(*args, **kwargs):
            raise RuntimeError("no convergence")

        monkeypatch.setattr(power_mod, "solve_problem", boom)
        spec = cw_construction(5)
        prev = {s: spec.base_log_value(s, 2.4) for s in spec.base_support.triples}
        prob = component_support(spec.base_support, (2, 1, 1))
        prob = ComponentProblem(prob.target, prob.support, prob.group, component_log_values(prev, prob))
        rec = power_mod._solve_component((prob, 1, "A", power_mod.DEFAULT_CONFIG, []))
        assert rec.method == "certify" and "no convergence" in rec.error
        assert np.isfinite(rec.log_value)

    def test_cache_round_trip(self, tmp_path):
        spec = cw_construction(5)
        cache = ValueTableCache(tmp_path)
        a = analyze_power(spec, 3, 2.3729, "hybrid", cache=cache)
        assert len(list(tmp_path.glob("*.json"))) == 3
        b = analyze_power(spec, 3, 2.3729, "hybrid", cache=cache)
        assert a.log_bound == b.log_bound
        assert a.table.entries == b.table.entries

    def test_workers_match_serial(self):
        spec = asym_construction(3)
        a = analyze_power(spec, 3, 2.443, "A", workers=1)
        b = analyze_power(spec, 3, 2.443, "A", workers=2)
        assert a.table.entries == b.table.entries
