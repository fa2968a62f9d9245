
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from gerstenhaber.algebroid import tangent_algebroid, validate_algebroid
from gerstenhaber.differentials import base_field, check_qlb_of
from gerstenhaber.exterior import Multivector, exterior_derivative, sharp_power, vector_field
from gerstenhaber.hamiltonian import (HatMap, PreconditionFailed, check_hamiltonian,
                                      hamiltonian_twist, twisted_poisson_defects,
                                      twisted_poisson_qlb)
from gerstenhaber.scalars import Polynomial

from helpers import (P, double_so3_qlb, lie_poisson_transformation, multivectors, so3_action,
                     symplectic_r4, tangent_frames)

SLOW = settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def r3_data():
    T, D = tangent_frames(["x1", "x2", "x3"])
    return Multivector.monomial(T, (0, 1), 1), Multivector.monomial(D, (0, 1, 2), 1)


class TestTwistedPoisson:
    def test_r3_preconditions_hold(self):
        pi, phi = r3_data()
        assert exterior_derivative(phi).is_zero()
        # ∧³π♯ kills any 3-form because π has rank 2
        assert sharp_power(pi, phi).is_zero()
        assert twisted_poisson_defects(pi, phi).passed

    def test_r3_qlb(self):
        q, rep = twisted_poisson_qlb(*r3_data())
        assert rep.passed
        assert check_qlb_of(q).passed
        assert validate_algebroid(q.algebroid).passed

    def test_r3_bracket_is_twisted(self):
        # [dx1, dx2]_{π,φ} = φ(π♯dx1, π♯dx2, ·) = dx3
        q, _ = twisted_poisson_qlb(*r3_data())
        assert str(q.algebroid.bracket_generators(0, 1)) == "dx3"

    def test_r3_perturbed(self):
        pi, phi = r3_data()
        T = pi.frame
        bad = pi + Multivector(T, 2, {(1, 2): P("x2", T.varset)})
        with pytest.raises(PreconditionFailed) as err:
            twisted_poisson_qlb(bad, phi)
        rep = err.value.report
        assert not rep.passed
        fail = {f["label"]: f["residual"] for f in rep.failures()}
        assert fail == {"1/2[pi,pi] - (wedge^3 pi#)(phi)": "d/dx1∧d/dx2∧d/dx3"}
        assert "d/dx1∧d/dx2∧d/dx3" in str(err.value)

    def test_non_closed_phi(self):
        T, D = tangent_frames(["x1", "x2", "x3", "x4"])
        pi = Multivector.zero(T, 2)
        phi = Multivector(D, 3, {(0, 1, 2): P("x4", D.varset)})
        rep = twisted_poisson_defects(pi, phi)
        assert [f["label"] for f in rep.failures()] == ["d(phi)"]

    def test_symplectic_r4_sign(self):
        pi, phi = symplectic_r4(-1)
        q, rep = twisted_poisson_qlb(pi, phi)
        assert rep.passed
        pi, phi = symplectic_r4(1)
        with pytest.raises(PreconditionFailed):
            twisted_poisson_qlb(pi, phi)

    def test_base_field_is_pi(self):
        # with δx_i = Σ π^{ij} dx_j the base field of the differential is −π
        pi, phi = symplectic_r4(-1)
        q, _ = twisted_poisson_qlb(pi, phi)
        bf = base_field(q.delta)
        assert bf.frame == pi.frame
        assert bf == -pi

    def test_rejects_wrong_degrees(self):
        pi, phi = r3_data()
        with pytest.raises(ValueError):
            twisted_poisson_qlb(Multivector.monomial(pi.frame, (0,), 1), phi)


def trivial_tangent_case():
    """Zero qlb on TM(ℝ²) acting on X = ℝ²×ℝ by the coordinate fields."""
    A = tangent_algebroid(["x1", "x2"])
    from gerstenhaber.differentials import AlmostDifferential, QuasiLieBialgebroid
    zero = AlmostDifferential(A, 2, [Multivector.zero(A.frame, 1)] * 2,
                              [Multivector.zero(A.frame, 2)] * 2)
    q = QuasiLieBialgebroid(zero, Multivector.zero(A.frame, 3))
    X = tangent_algebroid(["x1", "x2", "s"])
    fields = [Multivector.monomial(X.frame, (i,), 1) for i in range(2)]
    J = [Polynomial.variable(X.varset, c) for c in ("x1", "x2")]
    return q, fields, J, Multivector.zero(X.frame, 2)


def so3_on_r3_case():
    """The so(3) double acting on ℝ³ by rotations with Π = 0; Ω maps to zero."""
    q = double_so3_qlb()
    S = so3_action()
    T = tangent_algebroid(["x1", "x2", "x3"])
    fields = [vector_field(T.frame, S.anchor[i]) for i in range(3)]
    return q, fields, [], Multivector.zero(T.frame, 2)


def lie_poisson_case():
    b0, act, q = lie_poisson_transformation()
    A = q.algebroid
    fields = [Multivector(A.tangent_frame, 1, {(j,): A.anchor[i][j] for j in range(3)}) for i in range(3)]
    J = [Polynomial.variable(A.varset, c) for c in A.coords]
    return q, fields, J, base_field(q.delta), {"b": b0, "act": act}


CASES = {"tangent": trivial_tangent_case, "so3-on-r3": so3_on_r3_case}


class TestCheckHamiltonian:
    @pytest.mark.parametrize("name", sorted(CASES))
    def test_cases_pass(self, name):
        assert check_hamiltonian(*CASES[name]()).passed

    def test_omega_image_vanishes(self):
        q, fields, J, _ = so3_on_r3_case()
        assert HatMap(q.algebroid, fields, J)(q.omega).is_zero()

    def test_lie_poisson_space(self):
        q, fields, J, Pi, tr = lie_poisson_case()
        assert check_hamiltonian(q, fields, J, Pi, tr).passed
        bad = check_hamiltonian(q, fields, J, -Pi, tr)
        labels = {f["label"] for f in bad.failures()}
        assert "action3(dy1)" in labels and "mapping(1,2)" in labels

    def test_non_invariant_pi(self):
        q, fields, J, _ = so3_on_r3_case()
        T = fields[0].frame
        rep = check_hamiltonian(q, fields, J, Multivector.monomial(T, (0, 1), 1))
        labels = {f["label"] for f in rep.failures()}
        assert "[Pi,Y1] - delta^" in labels

    def test_wrong_anchor(self):
        q, fields, J, Pi = trivial_tangent_case()
        rep = check_hamiltonian(q, [fields[1], fields[0]], J, Pi)
        assert {f["label"] for f in rep.failures()} == {"anchor(e1,x1)", "anchor(e1,x2)",
                                                        "anchor(e2,x1)", "anchor(e2,x2)"}

    def test_hat_is_identity_on_tangent(self):
        A = tangent_algebroid(["x1", "x2"])
        fields = [Multivector.monomial(A.frame, (i,), 1) for i in range(2)]
        hat = HatMap(A, fields, [Polynomial.variable(A.varset, c) for c in A.coords])
        X = Multivector(A.frame, 2, {(0, 1): P("x1^2 - x2", A.varset)})
        assert hat(X) == X


@SLOW
@given(st.data())
def test_twist_covariance(data):
    name = data.draw(st.sampled_from(sorted(CASES)))
    q, fields, J, Pi = CASES[name]()
    assert check_hamiltonian(q, fields, J, Pi).passed
    A = q.algebroid
    t = data.draw(multivectors(A.frame, 2, 3, 1 if A.coords else 0))
    q2, Pi2 = hamiltonian_twist(q, fields, J, Pi, t)
    assert check_qlb_of(q2).passed
    assert check_hamiltonian(q2, fields, J, Pi2).passed


def test_twist_covariance_frozen():
    q, fields, J, Pi = so3_on_r3_case()
    t = Multivector.monomial(q.algebroid.frame, (0, 1), 1)
    _, Pi2 = hamiltonian_twist(q, fields, J, Pi, t)
    # Ŷ1∧Ŷ2 = x3 (x1∂2∧∂3 − x2∂1∧∂3 + x3∂1∧∂2) up to the rotation sign convention
    assert sorted(Pi2.coeffs) == [(0, 1), (0, 2), (1, 2)]
    assert str(Pi2.coefficient((0, 1))).replace("(", "").replace(")", "").lstrip("-") == "x3^2"
