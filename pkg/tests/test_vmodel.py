import pytest

from conftest import hyperbolic_metric
from orbitlab.arith import QpModZp
from orbitlab.cyclotomic import CycNumber
from orbitlab.lazard import LieRing, Subring
from orbitlab.metric import MetricGroup
from orbitlab.vmodel import (
    VModelData,
    VModelError,
    basis_vector,
    build_hyperbolic,
    eta,
    eta_matrix,
    gamma_act,
    parse_vmodel,
    qhat_matrix,
    serialize_vmodel,
    validate_data,
    verify_ribbon,
)


def test_validate_hyperbolic_certificate():
    d = build_hyperbolic(3, 1, 1)
    cert = validate_data(d)
    assert cert["order"] == 9 and cert["ideal_order"] == 3
    assert cert["dim"] == 9 == d.dim()
    assert cert["axioms"][-1] == "section"


def pairing_metric_rank4(p=3):
    """Nondegenerate pairing on rank 4 with q = 0 on <e3, e4>: B(e1,e3) =
    B(e2,e4) = 1/p, everything else zero."""
    z = QpModZp(p, 0, 1)
    v = QpModZp(p, 1, 1)
    gram = [[z] * 4 for _ in range(4)]
    gram[0][2] = gram[2][0] = v
    gram[1][3] = gram[3][1] = v
    return MetricGroup(p, (1,) * 4, [z] * 4, gram, name="pairing4")


class TestValidateFailures:
    def test_metric_shape(self):
        ring = LieRing(3, 1, 2, {}, name="a2")
        a = Subring(ring, [(1, 0)])
        wrong_p = hyperbolic_metric(5, 1, 1)
        with pytest.raises(VModelError) as e:
            validate_data(VModelData(ring, a, wrong_p))
        assert e.value.axiom == "metric-shape"

    def test_ideal(self):
        # a non-ideal never reaches validate_data: the quotient in the
        # bundle constructor already rejects it
        ring = LieRing(3, 1, 3, {(0, 1): (0, 0, 1)}, name="h3")
        not_ideal = Subring(ring, [(1, 0, 0)])
        with pytest.raises(ValueError):
            VModelData(ring, not_ideal, pairing_metric_rank4())

    def test_abelian(self):
        ring = LieRing(3, 1, 4, {(0, 1): (0, 0, 1, 0)}, name="h3xa1")
        a = Subring(ring, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)])
        d = VModelData(ring, a, pairing_metric_rank4())
        with pytest.raises(VModelError) as e:
            validate_data(d)
        assert e.value.axiom == "abelian"

    def test_isotropic_rejects_perturbed_q(self):
        ring = LieRing(3, 1, 2, {}, name="a2")
        a = Subring(ring, [(1, 0)])
        z, v = QpModZp(3, 0, 1), QpModZp(3, 1, 1)
        bad_q = MetricGroup(3, (1, 1), [v, z],
                            [[v.scale(2), v], [v, z]], name="offender")
        d = VModelData(ring, a, bad_q)
        with pytest.raises(VModelError) as e:
            validate_data(d)
        assert e.value.axiom == "isotropic"

    def test_lagrangian_rejects_small_ideal(self):
        ring = LieRing(3, 1, 2, {}, name="a2")
        a = Subring(ring, [])
        d = VModelData(ring, a, hyperbolic_metric(3, 1, 1))
        with pytest.raises(VModelError) as e:
            validate_data(d)
        assert e.value.axiom == "lagrangian"

    def test_invariance_rejects_non_ad_invariant_q(self):
        # q is the e1-e3 / e2-e4 pairing; conjugating e1 + e2 by Exp(e1)
        # picks up e3 and changes q by B(e1, e3) = 1/3
        ring = LieRing(3, 1, 4, {(0, 1): (0, 0, 1, 0)}, name="h3xa1")
        a = Subring(ring, [(0, 0, 1, 0), (0, 0, 0, 1)])
        d = VModelData(ring, a, pairing_metric_rank4())
        with pytest.raises(VModelError) as e:
            validate_data(d)
        assert e.value.axiom == "invariance"

    def test_section_must_fix_zero(self):
        d0 = build_hyperbolic(3, 1, 1)
        section = {beta: d0.lift(beta) for beta in d0.b_elements}
        section[(0,)] = (1, 0)
        d = VModelData(d0.ring, d0.a, d0.metric, section=section)
        with pytest.raises(VModelError) as e:
            validate_data(d)
        assert e.value.axiom == "section"

    def test_section_must_split_projection(self):
        d0 = build_hyperbolic(3, 1, 1)
        section = {beta: d0.lift(beta) for beta in d0.b_elements}
        section[(1,)] = (0, 2)  # projects to (2,), not (1,)
        d = VModelData(d0.ring, d0.a, d0.metric, section=section)
        with pytest.raises(VModelError) as e:
            validate_data(d)
        assert e.value.axiom == "section"


def test_gamma_closed_form_on_hyperbolic_plane():
    # with the coordinate section over the abelian plane, g = (a, b) sends
    # 1_{alpha, beta} to zeta^(a alpha) 1_{alpha, beta + b}
    d = build_hyperbolic(3, 1, 1)
    validate_data(d)
    for g in d.ring.elements():
        a_part, b_part = g
        for alpha, beta in d.pairs:
            v = gamma_act(d, g, basis_vector(d, alpha, beta))
            target = (alpha, ((beta[0] + b_part) % 3,))
            assert set(v) == {target}
            assert v[target] == CycNumber.root(3, 1, a_part * alpha[0])


def test_eta_closed_form_with_linear_section():
    d = build_hyperbolic(5, 1, 1)
    validate_data(d)
    for alpha, beta in d.pairs:
        v = eta(d, basis_vector(d, alpha, beta))
        target = (alpha, ((alpha[0] + beta[0]) % 5,))
        assert v == {target: CycNumber.one(5, 1)}


def test_eta_with_noisy_section_still_monomial():
    d = build_hyperbolic(3, 1, 1, section_seed=5)
    validate_data(d)
    for alpha, beta in d.pairs:
        v = eta(d, basis_vector(d, alpha, beta))
        (target, coeff), = v.items()
        assert target == (alpha, ((alpha[0] + beta[0]) % 3,))
        # the coefficient is a root of unity
        assert (coeff * coeff.conj()).rational_value() == 1


def test_verify_ribbon_passes_default_and_seeded():
    for seed in (None, 11):
        d = build_hyperbolic(3, 1, 1, section_seed=seed)
        report = verify_ribbon(d)
        assert report["pass"]
        assert [c["check"] for c in report["checks"]] == [
            "action", "equivariance", "gu-rank", "h-beta", "gauss-card",
            "theorem1"]
        assert all(c["status"] == "PASS" for c in report["checks"])
        assert report["counterexamples"] == []
        assert report["dim"] == 9


def test_verify_ribbon_matrices_agree():
    d = build_hyperbolic(3, 1, 1)
    assert eta_matrix(d) == qhat_matrix(d)


def test_forged_eta_detected_with_witness():
    d = build_hyperbolic(3, 1, 1)
    forged = [row[:] for row in eta_matrix(d)]
    forged[0][0] = forged[0][0] + CycNumber.one(3, 1)
    report = verify_ribbon(d, eta_override=forged)
    assert not report["pass"]
    statuses = {c["check"]: c["status"] for c in report["checks"]}
    assert statuses["theorem1"] == "FAIL"
    assert all(v == "PASS" for k, v in statuses.items() if k != "theorem1")
    (ce,) = [c for c in report["counterexamples"] if c["check"] == "theorem1"]
    assert ce["witness"]["row"] == d.pairs[0]
    assert ce["witness"]["eta"] != ce["witness"]["qhat"]


def test_serialize_round_trip_default_section():
    d = build_hyperbolic(3, 1, 1)
    text = serialize_vmodel(d)
    back = parse_vmodel(text)
    assert serialize_vmodel(back) == text
    assert verify_ribbon(back)["pass"]


def test_serialize_round_trip_custom_section():
    d0 = build_hyperbolic(3, 1, 1)
    section = {beta: d0.lift(beta) for beta in d0.b_elements}
    section[(1,)] = (2, 1)  # same coset, nondefault representative
    d = VModelData(d0.ring, d0.a, d0.metric, section=section, name="custom")
    text = serialize_vmodel(d)
    assert "\ns " in text  # the nondefault section is spelled out
    back = parse_vmodel(text)
    assert back.s == d.s
    assert serialize_vmodel(back) == text
    assert verify_ribbon(back)["pass"]


def test_nonsplit_ideal_rejected():
    ring = LieRing(3, 2, 2, {}, name="a2_z9")
    a = Subring(ring, [(3, 0)])
    with pytest.raises(Exception):
        VModelData(ring, a, hyperbolic_metric(3, 2, 1))
