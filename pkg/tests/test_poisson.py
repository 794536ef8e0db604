import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pld.deform import exp_kernel
from pld.models import build, coupled_model, euler_constants, lorenz_constants
from pld.poisson import (BiHamiltonianSystem, HamiltonianSystem, PoissonStructure,
                         bihamiltonian_residual_at, casimir_residual_at, compatibility_residual_at,
                         constant_field, coordinate_field, fd_partials, gradient_check,
                         hamiltonian_vf, jacobi_residual_at, linear_field,
                         linear_poisson_from_constants, numerical_rank, poisson_bracket,
                         random_points, worst_over)

ETAS = (-1.0, -0.25, 0.0, 0.25, 1.0)
SYSTEMS = ("lorenz", "euler")


def point(dim):
    return arrays(np.float64, dim, elements=st.floats(-2, 2))


def catalog_structures(eta):
    for name in SYSTEMS:
        b = build(name, eta)
        yield b, b.p0
        yield b, b.p1
        yield b, b.pencil_structure(0.5)


class TestLinear:
    def test_lorenz_p1(self):
        P = linear_poisson_from_constants(lorenz_constants()[1])
        assert P.bivector(np.array([1.0, 2, 3, 4]))[0, 1] == pytest.approx(1.0)

    def test_zero_point(self):
        for sc in lorenz_constants() + euler_constants():
            P = linear_poisson_from_constants(sc)
            assert not np.any(P.bivector(np.zeros(sc.dim)))

    def test_euler_p0(self):
        pi = linear_poisson_from_constants(euler_constants()[0]).bivector(np.ones(3))
        assert (pi[0, 1], pi[0, 2], pi[1, 2]) == (-1.0, 1.0, -1.0)

    def test_partials_are_constants(self):
        sc = lorenz_constants()[0]
        P = linear_poisson_from_constants(sc)
        x = np.array([0.3, -1, 2, 0.5])
        np.testing.assert_allclose(P.derivatives(x), fd_partials(P.bivector, x), atol=1e-9)

    def test_undeformed_catalog_is_linear(self):
        for name in SYSTEMS:
            b = build(name, 0.0)
            for P, sc in ((b.p0, b.sc0), (b.p1, b.sc1)):
                L = linear_poisson_from_constants(sc)
                for x in random_points(b.dim, 20, 1):
                    np.testing.assert_array_equal(P.bivector(x), L.bivector(x))


class TestBracket:
    def test_self_bracket(self):
        b = build("lorenz", 0.7)
        for x in random_points(4, 10):
            assert abs(poisson_bracket(b.p0, b.h0, b.h0, x)) <= 1e-14

    def test_lorenz_p0_coordinates(self):
        b = build("lorenz", 0.0)
        x1, x2 = coordinate_field(4, 0), coordinate_field(4, 1)
        assert poisson_bracket(b.p0, x1, x2, [0, 0, 2, 0]) == pytest.approx(-1.0)

    def test_euler_p1_coordinates(self):
        b = build("euler", 0.0)
        x2, x3 = coordinate_field(3, 1), coordinate_field(3, 2)
        assert poisson_bracket(b.p1, x2, x3, [3, 0, 0]) == pytest.approx(-6.0)

    def test_dimension_mismatch(self):
        b = build("euler", 0.0)
        with pytest.raises(ValueError):
            poisson_bracket(b.p1, coordinate_field(4, 0), coordinate_field(3, 1), [0, 0, 0])


class TestVectorField:
    def test_lorenz_undeformed(self):
        b = build("lorenz", 0.0)
        v = hamiltonian_vf(b.p0, b.h0, [1, 2, 3, 4])
        np.testing.assert_allclose(v, [4, -3, 2, 0], atol=1e-15)

    def test_euler_casimir_point(self):
        b = build("euler", 0.0)
        np.testing.assert_array_equal(hamiltonian_vf(b.p0, b.h0, [0, 1, 1]), 0)

    @pytest.mark.parametrize("eta", ETAS)
    def test_listed_casimirs_give_zero_field(self, eta):
        for b, P in catalog_structures(eta):
            for C in P.casimirs:
                for x in random_points(b.dim, 10, 3):
                    assert np.max(np.abs(hamiltonian_vf(P, C, x))) <= 1e-10

    def test_system_dataclass(self):
        b = build("lorenz", 0.2)
        sys0 = HamiltonianSystem(b.p0, b.h0)
        x = np.array([0.1, 0.2, 0.3, 0.4])
        np.testing.assert_array_equal(sys0.field(x), hamiltonian_vf(b.p0, b.h0, x))
        with pytest.raises(ValueError):
            HamiltonianSystem(b.p0, coordinate_field(3, 0))


class TestJacobi:
    def test_lorenz_p1(self):
        assert jacobi_residual_at(build("lorenz", 0.5).p1, [1, 2, 3, 4]) <= 1e-9

    def test_constant_bivector(self):
        m = np.array([[0, 1.5, -2], [-1.5, 0, 0.5], [2, -0.5, 0]])
        P = PoissonStructure(3, lambda x: m)
        assert jacobi_residual_at(P, [0.3, 0.1, -4]) == 0.0

    def test_corrupted_euler_p0(self):
        eta = 1.0
        good = build("euler", eta).p0

        def bad(x):
            m = good.bivector(x).copy()
            m[1, 2] = 0.5 * eta * x[1] ** 2 + exp_kernel(x[0], eta)
            m[2, 1] = -m[1, 2]
            return m

        assert jacobi_residual_at(PoissonStructure(3, bad), [1, 1, 1]) > 1e-3

    def test_sign_of_quadratic_term_is_jacobi_blind(self):
        # in R^3 Jacobi reads v . curl v = 0, which both signs satisfy
        P = build("euler", 1.0, "sign-flip-eta-pi23-p0").p0
        assert jacobi_residual_at(P, [1, 1, 1]) <= 1e-9

    @pytest.mark.parametrize("eta", ETAS)
    def test_catalog(self, eta):
        for b, P in catalog_structures(eta):
            for x in random_points(b.dim, 100):
                assert jacobi_residual_at(P, x) <= 1e-9

    @given(st.sampled_from(SYSTEMS), st.floats(-1.5, 1.5), st.floats(-2, 2), st.data())
    def test_any_blend(self, name, eta, alpha, data):
        b = build(name, eta)
        x = data.draw(point(b.dim))
        assert jacobi_residual_at(b.pencil_structure(alpha), x) <= 1e-9

    def test_analytic_partials_match_fd(self):
        for name in SYSTEMS:
            b = build(name, 0.6)
            for P in (b.p0, b.p1):
                for x in random_points(b.dim, 10, 5):
                    np.testing.assert_allclose(P.derivatives(x), fd_partials(P.bivector, x), atol=1e-7)


class TestCompatibility:
    def test_lorenz(self):
        b = build("lorenz", 0.25)
        for x in random_points(4, 100):
            assert compatibility_residual_at(b.p0, b.p1, x) <= 1e-9

    def test_zero_second(self):
        P0 = build("euler", 0.5).p0
        Z = PoissonStructure(3, lambda x: np.zeros((3, 3)))
        assert compatibility_residual_at(P0, Z, [0.2, 0.3, 0.4]) == 0.0

    def test_euler_undeformed(self):
        b = build("euler", 0.0)
        assert compatibility_residual_at(b.p0, b.p1, [1, 2, 3]) <= 1e-9

    def test_incompatible_pair_detected(self):
        # so(3) and a quadratic bracket that is not compatible with it
        so3 = build("euler", 0.0).p0
        other = PoissonStructure(3, lambda x: np.array([[0, x[0] ** 2, 0], [-x[0] ** 2, 0, 0], [0, 0, 0]]))
        assert compatibility_residual_at(so3, other, [1, 1, 1]) > 1e-3


class TestCasimir:
    def test_lorenz_p0(self):
        b = build("lorenz", 0.8)
        assert casimir_residual_at(b.p0, b.h1, [1, 2, 3, 4]) <= 1e-12

    def test_constant(self):
        b = build("lorenz", 0.8)
        assert casimir_residual_at(b.p1, constant_field(4, 3.0), [1, 2, 3, 4]) == 0.0

    def test_euler_p1(self):
        b = build("euler", 0.4)
        assert casimir_residual_at(b.p1, b.h0, [0.3, 1, -2]) <= 1e-10

    def test_hamiltonians_are_crossed_casimirs(self):
        for name in SYSTEMS:
            for eta in ETAS:
                b = build(name, eta)
                for x in random_points(b.dim, 100):
                    assert casimir_residual_at(b.p1, b.h0, x) <= 1e-10
                    assert casimir_residual_at(b.p0, b.h1, x) <= 1e-10

    def test_non_casimir(self):
        b = build("euler", 0.4)
        assert casimir_residual_at(b.p0, b.h0, [0.3, 1, -2]) > 1e-3


class TestBiHamiltonian:
    def test_lorenz(self):
        b = build("lorenz", 0.6)
        for x in random_points(4, 100):
            assert bihamiltonian_residual_at(b.bihamiltonian, x) <= 1e-10

    def test_undeformed(self):
        for name in SYSTEMS:
            b = build(name, 0.0)
            for x in random_points(b.dim, 20):
                assert bihamiltonian_residual_at(b.bihamiltonian, x) <= 1e-12

    def test_euler(self):
        assert bihamiltonian_residual_at(build("euler", 1.0).bihamiltonian, [0.1, 0.2, 0.3]) <= 1e-10

    def test_mismatch_detected(self):
        b = build("lorenz", 0.6)
        B = BiHamiltonianSystem(HamiltonianSystem(b.p0, b.h0), HamiltonianSystem(b.p1, b.h0))
        assert bihamiltonian_residual_at(B, [1, 2, 3, 4]) > 1e-3


class TestInvolution:
    @pytest.mark.parametrize("eta", ETAS)
    def test_catalog(self, eta):
        for name in SYSTEMS:
            b = build(name, eta)
            for P in (b.p0, b.p1):
                for x in random_points(b.dim, 100):
                    assert abs(poisson_bracket(P, b.h0, b.h1, x)) <= 1e-10


class TestGradient:
    def test_lorenz_h0(self):
        assert gradient_check(build("lorenz", 0.3).h0, [1, 2, 3, 4]) <= 1e-6

    def test_linear(self):
        f = linear_field([1.0, -2.0, 0.5])
        assert gradient_check(f, [3, 4, 5]) <= 1e-10

    def test_euler_coproduct(self):
        cb = coupled_model(build("euler", 1.0), 2)
        for x in np.random.default_rng(0).uniform(-1, 1, (20, 6)):
            assert gradient_check(cb.h1N, x) <= 1e-6

    @given(st.sampled_from(SYSTEMS), st.floats(-1, 1), st.data())
    def test_catalog_gradients(self, name, eta, data):
        b = build(name, eta)
        x = data.draw(point(b.dim))
        for h in (b.h0, b.h1):
            assert gradient_check(h, x) <= 1e-6

    def test_wrong_gradient_detected(self):
        from pld.poisson import ScalarField
        f = ScalarField(2, lambda x: float(x[0] ** 2), lambda x: np.array([x[0], 0.0]))
        assert gradient_check(f, [1.0, 0.0]) > 0.1


class TestAntisymmetryAndRank:
    @given(st.sampled_from(SYSTEMS), st.floats(-2, 2), st.data())
    def test_antisymmetric_exactly(self, name, eta, data):
        b = build(name, eta)
        x = data.draw(point(b.dim))
        for P in (b.p0, b.p1, b.pencil_structure(0.3)):
            m = P.bivector(x)
            assert np.array_equal(m, -m.T)

    def test_antisymmetric_1000_points(self):
        for name in SYSTEMS:
            for eta in ETAS:
                b = build(name, eta)
                for x in random_points(b.dim, 1000, 11):
                    for P in (b.p0, b.p1):
                        m = P.bivector(x)
                        assert np.array_equal(m, -m.T)

    def test_generic_rank(self):
        for name in SYSTEMS:
            b = build(name, 0.5)
            for P in (b.p0, b.p1):
                assert P.rank_generic == 2
                for x in random_points(b.dim, 20):
                    assert numerical_rank(P, x) == 2

    def test_zero_bivector_rank(self):
        assert numerical_rank(build("euler", 0.0).p0, np.zeros(3)) == 0


class TestDeformationLimit:
    @pytest.mark.parametrize("name", SYSTEMS)
    def test_bracket_slope(self, name):
        x = random_points(build(name, 0).dim, 1, 42)[0] * 0.5
        b0 = build(name, 0.0)
        devs = [np.max(np.abs(build(name, e).p1.bivector(x) - b0.p1.bivector(x)))
                for e in (1e-1, 1e-2, 1e-3)]
        slope = np.polyfit(np.log10([1e-1, 1e-2, 1e-3]), np.log10(devs), 1)[0]
        assert abs(slope - 1) <= 0.1

    @pytest.mark.parametrize("name", SYSTEMS)
    def test_casimir_convergence(self, name):
        b0 = build(name, 0.0)
        x = np.array([0.4, -0.3, 0.7, 1.2][:b0.dim])
        prev = None
        for e in (1e-1, 1e-2, 1e-3):
            b = build(name, e)
            d = max(abs(b.h0.eval(x) - b0.h0.eval(x)), abs(b.h1.eval(x) - b0.h1.eval(x)))
            if prev is not None:
                assert 5 < prev / d < 20
            prev = d


def test_worst_over_reports_argmax_and_inf():
    pts = np.array([[0.0], [2.0], [1.0]])
    v, p = worst_over(pts, lambda x: float(x[0]))
    assert v == 2.0 and p[0] == 2.0
    v, _ = worst_over(pts, lambda x: np.inf if x[0] == 1.0 else 0.0)
    assert v == np.inf


def test_random_points_seeded():
    a = random_points(3, 5, 42)
    b = random_points(3, 5, 42)
    np.testing.assert_array_equal(a, b)
    assert a.min() >= -2 and a.max() <= 2
