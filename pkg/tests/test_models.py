import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import reference_fields as ref
from pld.algebra import jacobi_residual_constants
from pld.integrate import IntegratorConfig, integrate
from pld.models import (FAULTS, UnknownFault, build, build_euler, build_lorenz, chart_jacobian,
                        coupled_model, fold_multiply, from_product_chart,
                        lorenz_coordinate_change, lorenz_coordinate_change_inverse, model_card,
                        multiplication_jacobian, pullback, pushforward_field, pushforward_structure,
                        to_product_chart)
from pld.poisson import (casimir_residual_at, hamiltonian_vf, jacobi_residual_at, poisson_bracket,
                         random_points)
from pld.reduction import reduce_samples

SYSTEMS = ("lorenz", "euler")


class TestLorenz:
    def test_undeformed_limits(self):
        b = build_lorenz(0.0)
        x = np.array([1.0, 2, 3, 4])
        np.testing.assert_allclose(b.p0.bivector(x)[[0, 0, 1], [1, 2, 2]], [-1.5, 1.0, 0.0])
        np.testing.assert_allclose(b.p1.bivector(x)[[0, 0, 1], [1, 2, 2]], [1.0, 0.0, -0.5])
        assert b.h0.eval(x) == pytest.approx(3 * 4 - 1)
        assert b.h1.eval(x) == pytest.approx(13)

    def test_deformed_field_value(self):
        b = build_lorenz(0.5)
        v = b.flow(0)(np.array([1.0, 2, 3, 4]))
        expected = 2 * math.sin(2) + 3 * (math.cos(2) - 1)
        assert v[0] == pytest.approx(expected, abs=1e-13)
        assert v[0] == pytest.approx(-2.429845, abs=1e-6)

    def test_entries(self):
        eta = 0.9
        b = build_lorenz(eta)
        x = np.array([0.3, -0.7, 1.1, 1.7])
        p1 = b.p1.bivector(x)
        assert p1[0, 1] == pytest.approx(math.sin(eta * x[3]) / (4 * eta))
        assert p1[0, 2] == pytest.approx((math.cos(eta * x[3]) - 1) / (4 * eta))
        assert p1[1, 2] == pytest.approx(-x[0] / 2)

    def test_x4_casimir_of_both(self):
        b = build_lorenz(0.4)
        x4 = [c for c in b.casimirs0 if c.name == "C_x4"][0]
        for x in random_points(4, 20):
            assert casimir_residual_at(b.p0, x4, x) == 0.0
            assert casimir_residual_at(b.p1, x4, x) == 0.0


class TestEuler:
    def test_undeformed_limits(self):
        b = build_euler(0.0)
        x = np.array([1.0, 2, 3])
        assert b.h1.eval(x) == pytest.approx(-7.0)
        assert b.h0.eval(x) == pytest.approx(1 + 6)

    def test_undeformed_field(self):
        np.testing.assert_allclose(build_euler(0.0).flow(0)([1, 2, 3]), [-5, 4, -1], atol=1e-14)

    def test_deformed_first_component(self):
        assert build_euler(1.0).flow(0)([0, 1, 1])[0] == 0.0

    def test_entries(self):
        eta = 0.6
        b = build_euler(eta)
        x = np.array([0.4, 0.9, -0.5])
        E = (math.exp(-2 * eta * x[0]) - 1) / (2 * eta)
        assert b.p0.bivector(x)[1, 2] == pytest.approx(-eta * (x[1] ** 2 + x[2] ** 2) / 2 + E)
        assert b.p1.bivector(x)[1, 2] == pytest.approx(-eta * x[1] * x[2] + 2 * E)

    def test_base_field_against_expansion(self):
        for eta in (0.3, -0.8, 1.0):
            b = build_euler(eta)
            for x in random_points(3, 10, 2):
                np.testing.assert_allclose(b.flow(0)(x), ref.euler_base(eta, x), atol=1e-12)


class TestBundle:
    @pytest.mark.parametrize("name", SYSTEMS)
    def test_constants_jacobi(self, name):
        b = build(name, 0.3)
        assert b.sc0.is_antisymmetric() and b.sc1.is_antisymmetric()
        assert jacobi_residual_constants(b.sc0) <= 1e-12
        assert jacobi_residual_constants(b.sc1) <= 1e-12

    @pytest.mark.parametrize("name", SYSTEMS)
    def test_undeformed_bundle_is_lie_poisson(self, name):
        b = build(name, 0.0)
        for x in random_points(b.dim, 10):
            np.testing.assert_array_equal(b.p0.bivector(x), b.sc0.c @ x)
            np.testing.assert_array_equal(b.p1.bivector(x), b.sc1.c @ x)

    def test_unknown_system(self):
        with pytest.raises(ValueError):
            build("henon", 0.1)

    def test_unknown_fault(self):
        with pytest.raises(UnknownFault):
            build("lorenz", 0.1, "sign-flip-everything")

    def test_fault_names(self):
        assert len(FAULTS["lorenz"]) == len(FAULTS["euler"]) == 3
        for name in SYSTEMS:
            for fault in FAULTS[name]:
                assert build(name, 0.5, fault).fault == fault

    def test_monitors_unique(self):
        for name in SYSTEMS:
            names = [m.name for m in build(name, 0.5).monitors()]
            assert len(names) == len(set(names))

    def test_model_card(self):
        card = json.loads(model_card(build("euler", 0.25)))
        assert card["name"] == "euler" and card["eta"] == 0.25 and card["dim"] == 3
        assert set(card["p0"]) == {"pi12", "pi13", "pi23"}

    def test_linear_pencil(self):
        b = build("lorenz", 0.7)
        P = b.linear_pencil(0.5)
        assert jacobi_residual_at(P, [1, 2, 3, 4]) <= 1e-12


class TestCoupled:
    def test_rejects_single_copy(self):
        with pytest.raises(ValueError):
            coupled_model(build("euler", 1.0), 1)

    def test_abelian_limit_reduces_by_sum(self):
        for name in SYSTEMS:
            cb = coupled_model(build(name, 0.0), 2)
            x = np.random.default_rng(0).uniform(-1, 1, cb.dim)
            y, z = cb.split(x)
            np.testing.assert_array_equal(cb.reduction(x), y + z)
            assert cb.h0N.eval(x) == pytest.approx(cb.base.h0.eval(y + z))

    def test_lorenz_x4_frozen(self):
        cb = coupled_model(build("lorenz", 0.5), 2)
        for x in np.random.default_rng(1).uniform(-1, 1, (10, 8)):
            v = hamiltonian_vf(cb.p0N, cb.h0N, x)
            assert v[3] == 0.0 and v[7] == 0.0

    def test_euler_three_copies_reduce(self):
        cb = coupled_model(build("euler", 0.2), 3)
        x0 = np.random.default_rng(2).uniform(-0.5, 0.5, 9)
        cfg = IntegratorConfig("rk4", 1e-3, 5.0, 10)
        coupled = integrate(cb.flow(0), x0, cfg)
        base = integrate(cb.base.flow(0), cb.reduction(x0), cfg)
        assert np.max(np.abs(reduce_samples(cb, coupled.states) - base.states)) <= 1e-6

    @pytest.mark.parametrize("N", [2, 3])
    @pytest.mark.parametrize("name", SYSTEMS)
    def test_involution(self, name, N):
        cb = coupled_model(build(name, 0.7), N)
        for x in np.random.default_rng(3).uniform(-1, 1, (100, cb.dim)):
            for P in (cb.p0N, cb.p1N):
                assert abs(poisson_bracket(P, cb.h0N, cb.h1N, x)) <= 1e-9

    @pytest.mark.parametrize("name", SYSTEMS)
    def test_kernel_matches_chain_rule(self, name):
        for N in (2, 3):
            cb = coupled_model(build(name, -0.6), N)
            for x in np.random.default_rng(4).uniform(-1, 1, (20, cb.dim)):
                for which in (0, 1):
                    np.testing.assert_allclose(cb.flow(which)(x), cb.generic_flow(which)(x),
                                               rtol=0, atol=1e-10)

    @pytest.mark.parametrize("name", SYSTEMS)
    def test_per_copy_casimirs(self, name):
        cb = coupled_model(build(name, 0.5), 2)
        for x in np.random.default_rng(5).uniform(-1, 1, (20, cb.dim)):
            for P in (cb.p0N, cb.p1N):
                for C in P.casimirs:
                    assert casimir_residual_at(P, C, x) <= 1e-9

    def test_composed_hamiltonian_is_not_a_casimir(self):
        # only its projected field Dm . X vanishes
        cb = coupled_model(build("lorenz", 0.0), 2)
        x = np.array([0.3, 0.5, -0.2, 0.4, 0.1, -0.6, 0.8, 0.7])
        v = hamiltonian_vf(cb.p1N, cb.h0N, x)
        y, z = cb.split(x)
        assert v[1] == pytest.approx((y[3] * z[0] - y[0] * z[3]) / 2)
        assert np.max(np.abs(v)) > 1e-3
        J = multiplication_jacobian(cb.base.group, cb.split(x))
        assert np.max(np.abs(J @ v)) <= 1e-12

    def test_multiplication_jacobian_fd(self):
        for name in SYSTEMS:
            G = build(name, 0.8).group
            for N in (2, 3):
                parts = np.random.default_rng(6).uniform(-1, 1, (N, G.dim))
                J = multiplication_jacobian(G, parts)
                h = 1e-6
                flat = parts.ravel()
                for k in range(flat.size):
                    e = np.zeros_like(flat)
                    e[k] = h
                    col = (fold_multiply(G, (flat + e).reshape(N, -1))
                           - fold_multiply(G, (flat - e).reshape(N, -1))) / (2 * h)
                    assert np.max(np.abs(col - J[:, k])) <= 1e-8

    def test_pullback_gradient(self):
        from pld.poisson import gradient_check
        b = build("euler", 0.9)
        f = pullback(b.h0, b.group, 3)
        for x in np.random.default_rng(7).uniform(-1, 1, (10, 9)):
            assert gradient_check(f, x) <= 1e-6


class TestReferenceFields:
    @pytest.mark.parametrize("which", [0, 1])
    def test_lorenz_chart(self, which):
        eta = 0.7
        cb = coupled_model(build("lorenz", eta), 2)
        for w in np.random.default_rng(8).uniform(-1, 1, (10, 8)):
            g = from_product_chart(cb, w)
            v = chart_jacobian(cb, g) @ cb.flow(which)(g)
            np.testing.assert_allclose(v, ref.lorenz_chart(which, eta, w), atol=1e-12)

    @pytest.mark.parametrize("which", [0, 1])
    def test_euler_chart(self, which):
        eta = 0.6
        cb = coupled_model(build("euler", eta), 2)
        for w in np.random.default_rng(9).uniform(-1, 1, (10, 6)):
            g = from_product_chart(cb, w)
            v = chart_jacobian(cb, g) @ cb.flow(which)(g)
            np.testing.assert_allclose(v, ref.euler_chart(which, eta, w), atol=1e-12)

    def test_euler_product_coordinates(self):
        for eta in (1.0, -0.4):
            cb = coupled_model(build("euler", eta), 2)
            for x in np.random.default_rng(10).uniform(-1, 1, (10, 6)):
                np.testing.assert_allclose(cb.flow(1)(x), ref.euler_product_h1(eta, x), atol=1e-12)

    def test_chart_structure_pushforward(self):
        # the pushed-forward bracket and Hamiltonian give the chart field directly
        eta = 0.7
        cb = coupled_model(build("lorenz", eta), 2)
        P = pushforward_structure(cb, cb.p0N)
        H = pushforward_field(cb, cb.h0N)
        w = np.random.default_rng(11).uniform(-1, 1, 8)
        np.testing.assert_allclose(hamiltonian_vf(P, H, w), ref.lorenz_chart(0, eta, w), atol=1e-11)

    def test_reduction_is_first_projection_in_chart(self):
        cb = coupled_model(build("euler", 0.5), 2)
        x = np.random.default_rng(12).uniform(-1, 1, 6)
        w = to_product_chart(cb, x)
        np.testing.assert_allclose(w[:3], cb.reduction(x))


class TestCoordinateChange:
    def test_examples(self):
        np.testing.assert_array_equal(lorenz_coordinate_change([0, 0, 1]), [0, 0, 0])
        np.testing.assert_array_equal(lorenz_coordinate_change([1, 1, 2]), [1, 2, 2])

    @given(arrays(np.float64, 3, elements=st.floats(-1e3, 1e3)))
    def test_round_trip(self, p):
        back = lorenz_coordinate_change_inverse(lorenz_coordinate_change(p))
        np.testing.assert_allclose(back, p, rtol=1e-15, atol=1e-12)

    def test_round_trip_random(self):
        for p in np.random.default_rng(13).uniform(-5, 5, (100, 3)):
            np.testing.assert_allclose(lorenz_coordinate_change_inverse(lorenz_coordinate_change(p)), p,
                                       atol=1e-15)

    def test_chart_round_trip(self):
        for name in SYSTEMS:
            cb = coupled_model(build(name, 0.8), 3)
            for x in np.random.default_rng(14).uniform(-1, 1, (10, cb.dim)):
                np.testing.assert_allclose(from_product_chart(cb, to_product_chart(cb, x)), x, atol=1e-14)
