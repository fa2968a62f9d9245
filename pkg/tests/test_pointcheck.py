import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from gerstenhaber.algebroid import schouten, tangent_algebroid
from gerstenhaber.pointcheck import (PointedMultivector, RankDeficient, Subspace,
                                     compose_relation_check, direct_sum, fd_schouten,
                                     graph_multiplicativity_check, is_coisotropic, jacobian,
                                     perm_sign, relation_image)
from gerstenhaber.groupoids import GroupoidChartSample, PairGroupoid

from helpers import multivectors

SLOW = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def e(d, i):
    v = np.zeros(d)
    v[i] = 1.0
    return v


class TestPointedMultivector:
    def test_perm_sign(self):
        assert perm_sign([0, 1, 2]) == 1
        assert perm_sign([1, 0, 2]) == -1
        assert perm_sign([2, 0, 1]) == 1

    def test_components_roundtrip(self):
        P = PointedMultivector.from_components(4, 2, {(0, 2): 1.5, (1, 3): -2.0})
        assert P.components()[(0, 2)] == 1.5
        assert P.tensor[2, 0] == -1.5
        assert P(e(4, 1), e(4, 3)) == -2.0

    def test_unsorted_index_carries_sign(self):
        P = PointedMultivector.from_components(3, 2, {(1, 0): 1.0})
        assert P.components()[(0, 1)] == -1.0

    def test_wedge_normalization(self):
        P = PointedMultivector.wedge_vectors([e(3, 0), e(3, 1), e(3, 2)])
        assert P.components() == {(0, 1, 2): 1.0}

    def test_transform_is_pushforward(self):
        P = PointedMultivector.wedge_vectors([e(2, 0), e(2, 1)])
        M = np.array([[2.0, 1.0], [0.0, 3.0]])
        assert P.transform(M).components()[(0, 1)] == pytest.approx(np.linalg.det(M))

    def test_direct_sum_blocks(self):
        p = PointedMultivector.from_components(2, 2, {(0, 1): 1.0})
        S = direct_sum([(p, 1), (p, -1)])
        assert S.components() == {(0, 1): 1.0, (0, 2): 0.0, (0, 3): 0.0, (1, 2): 0.0,
                                  (1, 3): 0.0, (2, 3): -1.0}
        with pytest.raises(ValueError):
            direct_sum([(p, 1), (PointedMultivector(2, 1), 1)])


class TestCoisotropy:
    def test_pass_example(self):
        Pi = PointedMultivector.from_components(4, 2, {(0, 2): 1.0, (1, 3): 1.0})
        W = Subspace(np.stack([e(4, 0), e(4, 1)], axis=1))
        assert is_coisotropic(Pi, W)

    def test_fail_example(self):
        Pi = PointedMultivector.from_components(4, 2, {(0, 1): 1.0, (2, 3): 1.0})
        W = Subspace(np.stack([e(4, 0), e(4, 1)], axis=1))
        res = is_coisotropic(Pi, W)
        assert not res
        assert res.max_residual == pytest.approx(1.0)

    def test_full_space_always_coisotropic(self):
        Pi = PointedMultivector.from_components(3, 2, {(0, 1): 4.0})
        assert is_coisotropic(Pi, Subspace(np.eye(3)))

    def test_zero_subspace(self):
        Pi = PointedMultivector.from_components(3, 2, {(0, 1): 4.0})
        assert not is_coisotropic(Pi, Subspace(np.zeros((3, 0))))
        assert is_coisotropic(PointedMultivector(3, 2), Subspace(np.zeros((3, 0))))

    def test_dependent_basis_rejected(self):
        with pytest.raises(RankDeficient):
            Subspace(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))
        assert Subspace.span(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]), 3).dim == 1

    def test_degree_too_large(self):
        with pytest.raises(ValueError):
            is_coisotropic(PointedMultivector(2, 3), Subspace(np.eye(2)))

    @SLOW
    @given(st.integers(0, 2**32 - 1))
    def test_invariant_under_linear_change(self, seed):
        rng = np.random.default_rng(seed)
        d = 4
        Pi = PointedMultivector.from_components(d, 2, {(0, 2): 1.0, (1, 3): 1.0})
        W = Subspace(np.stack([e(d, 0), e(d, 1)], axis=1))
        M = rng.normal(size=(d, d)) + 3 * np.eye(d)
        W2 = Subspace.span(M @ W.basis, d)
        assert is_coisotropic(Pi.transform(M), W2, 1e-8)


class TestRelations:
    def test_relation_image_graph(self):
        # graph of the map v ↦ 2v on ℝ¹: R(C) = C
        R = Subspace(np.array([[2.0], [1.0]]))
        img = relation_image(R, 1, Subspace(np.array([[1.0]])))
        assert img.dim == 1

    def test_composition_of_coisotropic(self):
        # R = diagonal of ℝ²×ℝ², Π1 = π, Π2 = −π, C = a line: always coisotropic
        pi = PointedMultivector.from_components(2, 2, {(0, 1): 1.0})
        diag = Subspace(np.vstack([np.eye(2), np.eye(2)]))
        C = Subspace(np.array([[1.0], [0.0]]))
        rep = compose_relation_check(pi, -pi, diag, C)
        assert rep.flags["precondition_ok"] and rep.flags["conclusion_ok"]
        assert rep.passed

    def test_failed_precondition_reported(self):
        pi = PointedMultivector.from_components(2, 2, {(0, 1): 1.0})
        diag = Subspace(np.vstack([np.eye(2), np.eye(2)]))
        rep = compose_relation_check(pi, pi, diag, Subspace(np.array([[1.0], [0.0]])))
        assert not rep.flags["precondition_ok"]
        assert not rep.passed


class TestPairGroupoid:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_classification(self, k):
        rng = np.random.default_rng(k)
        m = 3
        comps = {I: float(rng.normal()) for I in itertools.combinations(range(m), k)}
        pi = PointedMultivector.from_components(m, k, comps)
        good = (-1) ** (k + 1)
        for sign, expect in ((good, True), (-good, False)):
            model = PairGroupoid(m, pi, sign)
            for _ in range(10):
                s = GroupoidChartSample.draw(model, rng)
                assert s.validate() < 1e-12
                assert graph_multiplicativity_check(s, k).passed is expect

    def test_not_composable(self):
        pi = PointedMultivector.from_components(2, 2, {(0, 1): 1.0})
        model = PairGroupoid(2, pi, -1)
        with pytest.raises(ValueError):
            model.multiply(np.zeros(4), np.ones(4))


class TestFiniteDifference:
    def test_jacobian_linear(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0], [0.0, -1.0]])
        assert np.allclose(jacobian(lambda z: A @ z, 2), A)

    def test_constant_fields_commute(self):
        P = PointedMultivector.from_components(3, 2, {(0, 1): 1.0, (1, 2): 2.0})
        res = fd_schouten(lambda x: P, lambda x: P, np.zeros(3))
        assert res.value.norm() < 1e-12 and not res.unstable

    def test_lie_poisson_is_poisson(self):
        def lp(x):
            return PointedMultivector.from_components(3, 2, {(0, 1): x[2], (0, 2): -x[1], (1, 2): x[0]})
        res = fd_schouten(lp, lp, np.array([0.3, -1.2, 0.7]))
        assert res.value.norm() < 1e-8

    @SLOW
    @given(st.data())
    def test_matches_symbolic_bracket(self, data):
        T = tangent_algebroid(["x1", "x2", "x3"])
        k = data.draw(st.integers(1, 2))
        kp = data.draw(st.integers(1, 2))
        A = data.draw(multivectors(T.frame, k, 3, 2))
        B = data.draw(multivectors(T.frame, kp, 3, 2))
        pt = data.draw(st.lists(st.integers(-3, 3), min_size=3, max_size=3))

        def ev(M):
            def f(x):
                at = dict(zip(T.coords, x))
                return PointedMultivector.from_components(
                    3, M.degree, {I: float(c.evaluate(at)) for I, c in M.coeffs.items()})
            return f
        exact = schouten(T, A, B)
        at = dict(zip(T.coords, pt))
        want = PointedMultivector.from_components(
            3, k + kp - 1, {I: float(c.evaluate(at)) for I, c in exact.coeffs.items()})
        got = fd_schouten(ev(A), ev(B), np.array(pt, dtype=float))
        assert np.abs(got.value.tensor - want.tensor).max() < 1e-5 * max(1.0, want.norm())
