from fractions import Fraction
from functools import reduce
from math import gcd

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import null_space

from conftest import HEXAGON
from laserbound.constructions import asym_construction, cw_construction
from laserbound.power import power_support
from laserbound.support import (
    S3,
    SWAP23,
    SupportError,
    SymmetryGroup,
    induced_group,
    kernel_basis,
    make_support,
    mirror_group,
    orbit_constraint_matrix,
    orbits,
    rational_nullspace,
    tight_simplex,
    trivial_group,
)

CW_BASE = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
ASYM_BASE = [(2, 0, 0), (1, 1, 0), (1, 0, 1)]


class TestMakeSupport:
    def test_cw_base(self):
        S = make_support(CW_BASE)
        assert S.degree == 2 and len(S) == 6
        assert S.triples == tuple(sorted(CW_BASE))

    def test_asym_base(self):
        S = make_support(ASYM_BASE)
        assert S.degree == 2 and len(S) == 3
        assert S.alphabets == ((1, 2), (0, 1), (0, 1))

    def test_singleton(self):
        S = make_support([(0, 0, 0)])
        assert S.degree == 0 and len(S) == 1

    def test_not_tight(self):
        S = make_support([(1, 0, 0), (1, 1, 0)])
        assert not S.is_tight and S.degree is None

    def test_duplicates_and_order(self):
        S = make_support([(0, 1, 1), (2, 0, 0), (0, 1, 1)])
        assert S.triples == ((0, 1, 1), (2, 0, 0))
        assert S.index((2, 0, 0)) == 1

    def test_rejects_bad_input(self):
        with pytest.raises(SupportError):
            make_support([])
        with pytest.raises(SupportError):
            make_support([(1, 2)])
        with pytest.raises(SupportError):
            make_support([(1.5, 0, 0)])
        with pytest.raises(SupportError):
            make_support([(1, 1, 0)]).index((0, 0, 2))

    def test_incidence_matches_loop(self):
        S = make_support(CW_BASE)
        for axis, A in enumerate(S.incidence()):
            for j, s in enumerate(S.triples):
                assert A[:, j].sum() == 1
                assert A[S.alphabets[axis].index(s[axis]), j] == 1

    @given(st.integers(0, 12))
    def test_b_tight_bound(self, d):
        S = tight_simplex(d)
        assert len(S) <= S.b_bound**2


class TestGroups:
    def test_cw_s3(self):
        S = make_support(CW_BASE)
        G = induced_group(S, S3)
        assert G.order == 6 and G.provenance == "coordinate"

    def test_asym_swap(self):
        S = make_support(ASYM_BASE)
        G = induced_group(S, SWAP23)
        assert G.order == 2
        g = [e for e in G.elements if e != (0, 1, 2)][0]
        assert S.triples[g[S.index((1, 1, 0))]] == (1, 0, 1)
        assert g[S.index((2, 0, 0))] == S.index((2, 0, 0))

    def test_identity_only(self):
        S = make_support(CW_BASE)
        assert induced_group(S, [(0, 1, 2)]).is_trivial()
        assert trivial_group(S).order == 1

    def test_generator_is_closed(self):
        S = make_support(CW_BASE)
        assert induced_group(S, [(1, 2, 0), (1, 0, 2)]).order == 6

    def test_violation_names_triple(self):
        S = make_support(ASYM_BASE)
        with pytest.raises(SupportError, match=r"not symmetric: \(\d+, \d+, \d+\)"):
            induced_group(S, S3)

    def test_bad_elements(self):
        with pytest.raises(SupportError):
            SymmetryGroup(((1, 0),), "trivial", 2)
        with pytest.raises(SupportError):
            SymmetryGroup(((0, 1, 2), (1, 2, 0)), "coordinate", 3)
        with pytest.raises(SupportError):
            SymmetryGroup(((0, 1), (0, 0)), "coordinate", 2)

    def test_mirror_cw_211(self):
        S = make_support([(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)])
        G = mirror_group(S, (2, 1, 1))
        pi = [e for e in G.elements if e != tuple(range(4))][0]
        img = {S.triples[i]: S.triples[pi[i]] for i in range(4)}
        assert img[(2, 0, 0)] == (0, 1, 1) and img[(1, 1, 0)] == (1, 0, 1)

    def test_mirror_asym_211(self):
        S = make_support([(1, 1, 0), (1, 0, 1)])
        G = mirror_group(S, (2, 1, 1))
        assert G.order == 2 and G.provenance == "mirror"

    def test_mirror_fixed_point(self):
        S = make_support([(1, 1, 1)])
        assert mirror_group(S, (2, 2, 2)).is_trivial()

    def test_mirror_leaves_support(self):
        with pytest.raises(SupportError):
            mirror_group(make_support([(2, 0, 0), (1, 1, 0)]), (2, 1, 1))


class TestOrbits:
    def test_power2_representatives(self):
        S = power_support(cw_construction(6), 1)
        orb = orbits(S, induced_group(S, S3))
        assert orb.orbit_count == 4
        reps = {max(S.triples[i] for i in np.flatnonzero(orb.orbit_id == o)) for o in range(4)}
        assert reps == {(4, 0, 0), (3, 1, 0), (2, 2, 0), (2, 1, 1)}

    def test_trivial_group(self):
        S = tight_simplex(5)
        assert orbits(S, trivial_group(S)).orbit_count == len(S)

    def test_same_orbit_iff_mapped(self):
        S = tight_simplex(6)
        G = induced_group(S, S3)
        orb = orbits(S, G)
        for i in range(len(S)):
            images = {g[i] for g in G.elements}
            assert set(np.flatnonzero(orb.orbit_id == orb.orbit_id[i])) == images

    def test_averaging_columns(self):
        S = tight_simplex(4)
        orb = orbits(S, induced_group(S, S3))
        E = orb.averaging()
        np.testing.assert_allclose(E.sum(axis=0), 1.0)

    @given(st.integers(1, 10))
    def test_subgroup_has_more_orbits(self, d):
        S = tight_simplex(d)
        counts = [orbits(S, induced_group(S, L)).orbit_count for L in ([(0, 1, 2)], SWAP23, S3)]
        assert counts[0] >= counts[1] >= counts[2]


class TestKernel:
    def test_cw_base_chi0(self):
        S = make_support(CW_BASE)
        K = kernel_basis(S, induced_group(S, S3))
        assert K.chi == 0 and K.dim == 2
        assert not K.touched_rows().any()

    def test_cw_power4_chi2(self):
        S = power_support(cw_construction(5), 2)
        assert kernel_basis(S, induced_group(S, S3)).chi == 2

    def test_asym_power4_chi1(self):
        S = power_support(asym_construction(3), 2)
        assert kernel_basis(S, induced_group(S, SWAP23)).chi == 1

    def test_hexagon(self):
        S = make_support(HEXAGON)
        K = kernel_basis(S, trivial_group(S))
        assert K.chi == 1
        col = K.R[:, 0]
        assert sorted(col.tolist()) == [-1, -1, -1, 1, 1, 1]
        assert col[np.flatnonzero(col)[0]] > 0

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    @pytest.mark.parametrize("L", [[(0, 1, 2)], SWAP23, S3])
    def test_columns_invariant_zero_marginals(self, d, L):
        S = tight_simplex(d)
        G = induced_group(S, L)
        K = kernel_basis(S, G)
        for j in range(K.chi):
            col = K.R[:, j]
            assert col.sum() == 0
            for A in S.incidence():
                assert not np.any(A @ col)
            for g in G.elements:
                assert np.array_equal(col[list(g)], col)
            assert reduce(gcd, map(int, col)) == 1
        if K.chi:
            assert np.linalg.matrix_rank(K.R.astype(float)) == K.chi

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6, 8])
    def test_chi_matches_float_nullspace(self, d):
        S = tight_simplex(d)
        G = induced_group(S, S3)
        orb = orbits(S, G)
        M = np.array(orbit_constraint_matrix(S, orb), float)
        assert kernel_basis(S, G).chi == null_space(M).shape[1]

    def test_rational_nullspace_small(self):
        M = [[1, 2, 3], [2, 4, 6]]
        basis = rational_nullspace(M, 3)
        assert len(basis) == 2
        for v in basis:
            assert sum(Fraction(a) * b for a, b in zip(M[0], v)) == 0

    def test_rational_nullspace_full_rank(self):
        assert rational_nullspace([[1, 0], [0, 1]], 2) == []

    @given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=4))
    def test_rational_nullspace_random(self, M):
        basis = rational_nullspace(M, 4)
        for v in basis:
            for row in M:
                assert sum(Fraction(a) * b for a, b in zip(row, v)) == 0
        rank = np.linalg.matrix_rank(np.array(M, float))
        assert len(basis) == 4 - rank


class TestPowerTables:
    @pytest.mark.parametrize("r,dim,chi", [(1, 4, 0), (2, 10, 2), (3, 30, 14), (4, 102, 70), (5, 374, 310)])
    def test_cw(self, r, dim, chi):
        S = power_support(cw_construction(5), r)
        K = kernel_basis(S, induced_group(S, S3))
        assert (K.dim, K.chi) == (dim, chi)

    @pytest.mark.parametrize("r,dim,chi", [(1, 4, 0), (2, 9, 1), (3, 25, 9), (4, 81, 49), (5, 289, 225)])
    def test_asym(self, r, dim, chi):
        S = power_support(asym_construction(3), r)
        K = kernel_basis(S, induced_group(S, SWAP23))
        assert (K.dim, K.chi) == (dim, chi)
