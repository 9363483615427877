import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import boundary_size_by_enumeration, boundary_size_by_sequences
from laserbound.constructions import (
    asym_boundary_count,
    asym_boundary_value,
    asym_construction,
    cw_boundary_count,
    cw_boundary_value,
    cw_construction,
    get_construction,
)
from laserbound.power import analyze_power, component_log_values, component_support, power_support
from laserbound.solvers import algorithm_A


def cw_sizes(q):
    return {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1, (1, 1, 0): q, (1, 0, 1): q, (0, 1, 1): q}


def asym_sizes(q):
    return {(2, 0, 0): 1, (1, 1, 0): q, (1, 0, 1): q}


class TestBase:
    def test_cw_values(self):
        spec = cw_construction(6)
        rho = 2.38719
        assert spec.base_log_value((2, 0, 0), rho) == 0.0
        assert spec.base_log_value((1, 1, 0), rho) == pytest.approx(rho / 3 * math.log(6))
        assert cw_construction(5).log_border_rank == pytest.approx(math.log(7))

    def test_asym_values(self):
        spec = asym_construction(4)
        rho = 2.46
        assert spec.base_log_value((1, 1, 0), rho) == spec.base_log_value((1, 0, 1), rho)
        assert spec.base_log_value((1, 1, 0), rho) == pytest.approx(rho / 3 * math.log(4))
        assert spec.base_log_value((2, 0, 0), rho) == 0.0
        assert asym_construction(3).log_border_rank == pytest.approx(math.log(4))

    @pytest.mark.parametrize("q", [1, 2, 5, 9])
    def test_rho3_gives_log_q(self, q):
        for spec in (cw_construction(q), asym_construction(q)):
            assert spec.base_log_value((1, 1, 0), 3.0) == pytest.approx(math.log(q), abs=1e-15)

    @pytest.mark.parametrize("make", [cw_construction, asym_construction])
    def test_symmetry_of_base_values(self, make):
        spec = make(5)
        for s in spec.base_support.triples:
            for sigma in spec.symmetry:
                img = tuple(s[i] for i in sigma)
                assert spec.base_log_value(img, 2.4) == spec.base_log_value(s, 2.4)

    def test_bad_q_and_name(self):
        with pytest.raises(ValueError):
            cw_construction(0)
        with pytest.raises(ValueError):
            get_construction("strassen", 3)

    def test_threshold(self):
        assert cw_construction(5).threshold(3) == pytest.approx(8 * math.log(7))
        assert asym_construction(3).threshold(2) == pytest.approx(4 * math.log(4))

    def test_orbit_representative(self):
        assert cw_construction(5).orbit_representative((1, 3, 2)) == (3, 2, 1)
        assert asym_construction(3).orbit_representative((4, 1, 3)) == (4, 3, 1)


class TestBoundaryFormulas:
    def test_cw_small_levels(self):
        rho, q = 2.3754770, 6
        assert cw_boundary_value(1, 2, q, rho) == pytest.approx(rho / 3 * math.log(q * q + 2))
        assert cw_boundary_value(1, 1, q, rho) == pytest.approx(rho / 3 * math.log(2 * q))
        assert cw_boundary_value(0, 0, q, rho) == 0.0

    def test_cw_power8_entry(self):
        v = math.exp(cw_boundary_value(3, 4, 5, 2.3728642))
        assert v == pytest.approx(5040.7184, rel=1e-4)

    def test_asym_entries(self):
        rho, q = 2.44303, 3
        assert asym_boundary_value(1, 1, q, rho) == pytest.approx(rho / 3 * math.log(2 * q))
        assert asym_boundary_value(4, 0, q, rho) == 0.0
        v = math.exp(asym_boundary_value(3, 4, 3, 2.44278))
        assert v == pytest.approx(1138.656007, rel=1e-6)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            cw_boundary_count(2, 5, 3)
        with pytest.raises(ValueError):
            asym_boundary_count(1, -1, 3)

    def test_large_level_exact(self):
        # factorials of 32 overflow doubles' integer range; the count must stay exact
        n = cw_boundary_count(5, 17, 5)
        assert isinstance(n, int) and n > 2**64
        assert cw_boundary_value(5, 17, 5, 3.0) == pytest.approx(math.log(n), rel=1e-15)


class TestEnumerationOracle:
    @pytest.mark.parametrize("r", [0, 1, 2, 3])
    @pytest.mark.parametrize("q", [1, 2, 5, 6])
    def test_cw_sequences(self, r, q):
        n = 2**r
        restricted = {t: s for t, s in cw_sizes(q).items() if t[2] == 0}
        for b in range(n + 1):
            target = (2 * n - b, b, 0)
            count = boundary_size_by_sequences(restricted, n, target)
            assert count == cw_boundary_count(r, b, q)
            assert count == boundary_size_by_sequences(restricted, n, (b, 2 * n - b, 0))

    @pytest.mark.parametrize("r", [0, 1, 2, 3])
    @pytest.mark.parametrize("q", [1, 3, 4])
    def test_asym_sequences(self, r, q):
        n = 2**r
        restricted = {t: s for t, s in asym_sizes(q).items() if t[2] == 0}
        for b in range(n + 1):
            target = (2 * n - b, b, 0)
            assert boundary_size_by_sequences(restricted, n, target) == asym_boundary_count(r, b, q)

    @pytest.mark.parametrize("r", [1, 2, 3])
    @pytest.mark.parametrize("make,sizes,count", [(cw_construction, cw_sizes, cw_boundary_count),
                                                   (asym_construction, asym_sizes, asym_boundary_count)])
    def test_every_boundary_triple(self, r, make, sizes, count):
        q = 5
        spec = make(q)
        for t in power_support(spec, r).triples:
            b = spec.boundary_index(t, r)
            if b is None:
                continue
            expected = boundary_size_by_enumeration(sizes(q), 2**r, t)
            assert count(r, b, q) == expected, t

    @given(st.integers(0, 3), st.integers(1, 8), st.data())
    def test_dp_matches_sequences(self, r, q, data):
        n = 2**r
        b = data.draw(st.integers(0, 2 * n))
        restricted = {t: s for t, s in cw_sizes(q).items() if t[2] == 0}
        target = (2 * n - b, b, 0)
        assert boundary_size_by_enumeration(cw_sizes(q), n, target) == \
            boundary_size_by_sequences(restricted, n, target)


class TestBoundaryDominatesSolver:
    @pytest.mark.parametrize("make,q,rho", [(cw_construction, 5, 2.3729), (asym_construction, 3, 2.443)])
    def test_levels(self, make, q, rho):
        spec = make(q)
        pa = analyze_power(spec, 2, rho, "A")
        for k in (1, 2):
            prev = pa.tables[k - 1]
            S_prev = power_support(spec, k - 1)
            for t in power_support(spec, k).triples:
                closed = spec.boundary_log_value(t, k, rho)
                if closed is None:
                    continue
                prob = component_support(S_prev, t)
                v = component_log_values(prev, prob)
                out = algorithm_A(prob.support, prob.group, v)
                assert out.log_bound <= closed + 1e-9, t
