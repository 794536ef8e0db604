import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pld.algebra import (CocycleMap, DimensionError, LiePencil, NonAdmissibleCocycle,
                         StructureConstants, cocycle_residual, dual_bracket,
                         jacobi_residual_constants, lie_bracket, pencil_constants)
from pld.models import euler_cocycle, euler_constants, lorenz_cocycle, lorenz_constants

E = np.eye(4)
F = np.eye(3)


def lorenz_pencil():
    return LiePencil(*lorenz_constants())


def euler_pencil():
    return LiePencil(*euler_constants())


class TestLieBracket:
    def test_so3(self):
        sc0, _ = euler_constants()
        np.testing.assert_array_equal(lie_bracket(sc0, F[0], F[1]), -F[2])

    @given(st.lists(st.floats(-5, 5), min_size=4, max_size=4))
    def test_self_bracket_vanishes(self, u):
        for sc in lorenz_constants():
            assert np.all(lie_bracket(sc, u, u) == 0)

    def test_lorenz_alpha_one(self):
        sc = pencil_constants(lorenz_pencil(), 1.0)
        np.testing.assert_allclose(lie_bracket(sc, E[0], E[1]), E[3] / 4)

    def test_dimension_mismatch(self):
        sc0, _ = euler_constants()
        with pytest.raises(DimensionError):
            lie_bracket(sc0, [1, 0], [0, 1, 0])

    def test_matches_ad(self):
        sc = pencil_constants(lorenz_pencil(), 0.3)
        u, v = np.arange(4.0), np.array([1.0, -1, 2, 0.5])
        np.testing.assert_allclose(sc.ad(u) @ v, lie_bracket(sc, u, v))


class TestJacobi:
    def test_so3(self):
        assert jacobi_residual_constants(euler_constants()[0]) == 0.0

    def test_abelian(self):
        assert jacobi_residual_constants(StructureConstants.zeros(5)) == 0.0

    def test_one_sided_corruption_detected(self):
        c = np.array(euler_constants()[0].c)
        c[0, 1, 2] = -c[0, 1, 2]
        assert jacobi_residual_constants(StructureConstants(3, c)) > 0

    @pytest.mark.parametrize("alpha", [-2, -1, 0, 0.5, 1, 2])
    def test_pencils_compatible(self, alpha):
        for p in (lorenz_pencil(), euler_pencil()):
            assert jacobi_residual_constants(pencil_constants(p, alpha)) <= 1e-12

    @given(st.floats(-10, 10))
    def test_pencil_any_alpha(self, alpha):
        for p in (lorenz_pencil(), euler_pencil()):
            assert jacobi_residual_constants(pencil_constants(p, alpha)) <= 1e-12


class TestPencil:
    def test_endpoints(self):
        p = lorenz_pencil()
        assert pencil_constants(p, 0) == p.sc0
        assert pencil_constants(p, 1) == p.sc1

    def test_half(self):
        sc = pencil_constants(lorenz_pencil(), 0.5)
        np.testing.assert_allclose(lie_bracket(sc, E[0], E[1]), E[3] / 8 - E[2] / 4)

    def test_dimension_check(self):
        with pytest.raises(DimensionError):
            pencil_constants(LiePencil(StructureConstants.zeros(3), StructureConstants.zeros(4)), 0.5)

    def test_antisymmetric(self):
        for p in (lorenz_pencil(), euler_pencil()):
            for sc in (p.sc0, p.sc1, pencil_constants(p, 0.3)):
                assert sc.is_antisymmetric()


class TestCocycle:
    @pytest.mark.parametrize("alpha", [0, 0.3, 1])
    def test_lorenz(self, alpha):
        sc = pencil_constants(lorenz_pencil(), alpha)
        assert cocycle_residual(sc, lorenz_cocycle(0.7)) <= 1e-13

    def test_zero_map(self):
        for p in (lorenz_pencil(), euler_pencil()):
            assert cocycle_residual(p.sc0, CocycleMap.zeros(p.sc0.dim)) == 0.0

    def test_corrupted_euler_detected(self):
        assert cocycle_residual(euler_constants()[0], euler_cocycle(1.0, "sign-flip-cocycle")) > 0

    @pytest.mark.parametrize("alpha", [-1, 0, 0.5, 1])
    @pytest.mark.parametrize("eta", [-1, 0, 0.25, 1])
    def test_common_cocycle(self, alpha, eta):
        for p, psi in ((lorenz_pencil(), lorenz_cocycle(eta)), (euler_pencil(), euler_cocycle(eta))):
            assert cocycle_residual(pencil_constants(p, alpha), psi) <= 1e-13

    def test_vanishes_at_zero(self):
        assert not np.any(lorenz_cocycle(0.0).psi)
        assert not np.any(euler_cocycle(0.0).psi)

    def test_antisymmetric_last_pair(self):
        for psi in (lorenz_cocycle(0.4), euler_cocycle(-0.3)):
            np.testing.assert_array_equal(psi.psi, -psi.psi.transpose(0, 2, 1))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            cocycle_residual(euler_constants()[0], lorenz_cocycle(1.0))


class TestDualBracket:
    def test_lorenz(self):
        eta = 0.6
        sc = dual_bracket(lorenz_cocycle(eta))
        expected = StructureConstants.from_brackets(4, {(1, 3): {2: eta}, (2, 3): {1: -eta}})
        np.testing.assert_allclose(sc.c, expected.c)

    def test_zero(self):
        assert dual_bracket(CocycleMap.zeros(4)) == StructureConstants.zeros(4)
        assert dual_bracket(lorenz_cocycle(0.0)) == StructureConstants.zeros(4)

    def test_euler_book(self):
        eta = 1.3
        sc = dual_bracket(euler_cocycle(eta))
        expected = StructureConstants.from_brackets(3, {(0, 1): {1: -eta}, (0, 2): {2: -eta}})
        np.testing.assert_allclose(sc.c, expected.c)

    def test_non_admissible(self):
        # dual of this map is [X1,X2] = X3, [X2,X3] = X2 which fails Jacobi
        psi = CocycleMap.from_wedges(3, {2: {(0, 1): 1.0}, 1: {(1, 2): 1.0}})
        with pytest.raises(NonAdmissibleCocycle):
            dual_bracket(psi)


class TestJson:
    def test_round_trip(self):
        for sc in lorenz_constants() + euler_constants():
            assert StructureConstants.from_json(sc.to_json()) == sc
        for psi in (lorenz_cocycle(0.7), euler_cocycle(-1.0)):
            back = CocycleMap.from_json(psi.to_json())
            np.testing.assert_array_equal(back.psi, psi.psi)

    @given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
                           st.floats(-3, 3, allow_nan=False), max_size=10))
    def test_round_trip_random(self, raw):
        brackets = {}
        for (i, j, k), v in raw.items():
            if i < j:
                brackets.setdefault((i, j), {})[k] = v
        sc = StructureConstants.from_brackets(4, brackets)
        assert StructureConstants.from_json(sc.to_json()) == sc

    def test_listing_convention(self):
        import json
        data = json.loads(lorenz_constants()[0].to_json())
        assert data["dim"] == 4
        assert all(i < j for i, j, _, _ in data["entries"])

    def test_shape_validated(self):
        with pytest.raises(DimensionError):
            StructureConstants(3, np.zeros((3, 3, 2)))
