import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcap.catalog import binary_qubit_channel, bsc, octonary_channel, quaternary_qubit_channel, random_classical_channel
from gcap.channels import ClassicalChannel, CQChannel, InputEnsemble, cq_joint, cq_mixture_pi_J, joint_classical, mixture_P_XY_given_J
from gcap.groups import AbelianGroup, InputGroup, ValidationError, enumerate_etas, enumerate_theta_hats
from gcap.htest import dh_classical
from gcap.rates import (
    allocate_eps,
    oneshot_converse,
    oneshot_group_capacity,
    oneshot_report,
    prop1_check,
    srm_error_bound,
    thm1_error_bound,
    thm2_rate_bound,
    thm4_error_bound,
    thm5_rate_bound,
    thm5_test,
)
from oracles import dh_dual

# hand-assembled from the oracle octonary tables: 0.2 + 4 * 2^-I0 + 2 * 2^-I1 with deterministic I_H at eps 0.1
OCTONARY_THM1 = 4.592857142857143
EXAMPLE2_IH = {0.01: 0.02180437037019062, 0.1: 0.2344652544124052}

GROUPS = [(2,), (4,), (8,), (2, 2), (2, 4), (3,), (9,), (6,), (12,)]


def group_of(orders):
    spec = {}
    for n in orders:
        for p, r in AbelianGroup.cyclic(n).factors:
            spec[(p, r)] = spec.get((p, r), 0) + 1
    return AbelianGroup.from_primary_spec([(p, r, m) for (p, r), m in sorted(spec.items())])


@st.composite
def instances(draw, noise=(0.0, 1.0)):
    G = group_of(draw(st.sampled_from(GROUPS)))
    counts = {}
    for p, s in G.s_index:
        counts[(p, s)] = draw(st.integers(0, 1))
    if not any(counts.values()):
        counts[G.s_index[0]] = 1
    J = InputGroup.from_counts(G, counts)
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    delta = draw(st.floats(*noise))
    base = random_classical_channel(G, G.order, rng, sparsity=0.3).W
    W = (1 - delta) * np.eye(G.order) + delta * base
    ch = ClassicalChannel(G, W)
    etas = list(enumerate_etas(J))
    eta = etas[draw(st.integers(0, len(etas) - 1))]
    b = G.element(draw(st.integers(0, G.order - 1)))
    return ch, J, eta, b


def test_octonary_thm1_matches_oracle():
    ch = octonary_channel()
    J = InputGroup.from_counts(ch.group, {(2, 2): 1})
    ens = InputEnsemble.averaged_over_dither(J)
    bound = thm1_error_bound(ch, J, {(0,): 0.1, (1,): 0.1}, ens=ens)
    assert bound.value == pytest.approx(OCTONARY_THM1, abs=1e-12)
    assert bound.vacuous


def test_bsc_thm1_is_eps_plus_two_to_r_minus_ih():
    ch = bsc(0.1)
    J = InputGroup.from_counts(ch.group, {(2, 1): 1})
    # eps 0.1 puts the deterministic test on the branch with value 1
    assert thm1_error_bound(ch, J, {(0,): 0.1}).value == pytest.approx(0.1 + 2 ** (1 - 1), abs=1e-12)


def test_exact_counts_option():
    ch = octonary_channel()
    J = InputGroup.from_counts(ch.group, {(2, 2): 1})
    ens = InputEnsemble.averaged_over_dither(J)
    exact = thm1_error_bound(ch, J, {(0,): 0.1, (1,): 0.1}, ens=ens, exact_counts=True).value
    # |T| = 2 and 1 in place of 4 and 2
    assert exact - 0.2 == pytest.approx((OCTONARY_THM1 - 0.2) / 2, abs=1e-12)


def test_allocation_validation():
    ch = octonary_channel()
    J = InputGroup.from_counts(ch.group, {(2, 2): 1})
    with pytest.raises(ValidationError):
        thm1_error_bound(ch, J, {(0,): 0.1})
    with pytest.raises(ValidationError):
        thm1_error_bound(ch, J, {(0,): 0.6, (1,): 0.5})
    with pytest.raises(ValidationError):
        allocate_eps(J, 1.5)
    assert allocate_eps(J, 0.2) == {(0,): 0.1, (1,): 0.1}


def test_grid_allocation_never_worse():
    ch = octonary_channel()
    J = InputGroup.from_counts(ch.group, {(2, 2): 1})
    uni = thm1_error_bound(ch, J, allocate_eps(J, 0.2)).value
    grid = thm1_error_bound(ch, J, allocate_eps(J, 0.2, "grid", channel=ch)).value
    assert grid <= uni + 1e-12


def test_thm2_penalty():
    ch = bsc(0.2)
    J = InputGroup.from_counts(ch.group, {(2, 1): 1})
    ens = InputEnsemble.regular(J)
    d = dh_classical(joint_classical(ens, ch), mixture_P_XY_given_J(ens, ch), 0.1).value
    assert thm2_rate_bound(ch, J, 0.1, 0.6).value == pytest.approx(d - 1, abs=1e-12)
    with pytest.raises(ValidationError):
        thm2_rate_bound(ch, J, 0.3, 0.2)


@given(instances())
def test_prop1_dominance(inst):
    ch, J, eta, b = inst
    alloc = allocate_eps(J, 0.2)
    for mode in ("randomized", "deterministic"):
        lhs, rhs, ok = prop1_check(ch, J, alloc, eta, b, mode)
        assert ok, (lhs, rhs)


@given(instances(noise=(0.0, 0.3)), st.floats(0.02, 0.5))
def test_converse_exceeds_certified_rate(inst, eps):
    ch, J, eta, b = inst
    alloc = allocate_eps(J, eps)
    bound = thm1_error_bound(ch, J, alloc, eta, b)
    eps_prime = min(bound.value, 0.999)
    if bound.value < 1:
        assert J.rate() <= oneshot_converse(ch, J, eps_prime, eta, b) + 1e-9


def test_converse_is_nonnegative_and_monotone():
    ch = octonary_channel()
    J = InputGroup.from_counts(ch.group, {(2, 2): 1})
    vals = [oneshot_converse(ch, J, e) for e in (0.05, 0.2, 0.5)]
    assert vals[0] >= 0 and vals == sorted(vals)


def test_converse_on_z2_is_ih():
    ch = bsc(0.1)
    J = InputGroup.from_counts(ch.group, {(2, 1): 1})
    P = 0.5 * ch.W
    Q = np.full((2, 2), 0.25)
    assert oneshot_converse(ch, J, 0.2) == pytest.approx(dh_classical(P, Q, 0.2, "randomized").value, abs=1e-12)


def test_oneshot_capacity_on_octonary():
    ch = octonary_channel()
    J = InputGroup.from_counts(ch.group, {(2, 2): 1})
    value, ens, theta = oneshot_group_capacity(ch, J, 0.2)
    assert theta in enumerate_theta_hats(J)
    assert value <= oneshot_converse(ch, J, 0.2) + 1e-12


class TestCQ:
    def setup_method(self):
        self.ch = binary_qubit_channel()
        self.J = InputGroup.from_counts(self.ch.group, {(2, 1): 1})

    @pytest.mark.parametrize("eps", sorted(EXAMPLE2_IH))
    def test_thm4_formula(self, eps):
        # |Theta| = 1 and zeta(Z2) = 1, so the prefactor is 33 + 16 = 49
        want = 49 * math.sqrt(eps) + 8 * 2 ** (1 - EXAMPLE2_IH[eps])
        assert thm4_error_bound(self.ch, self.J, {(0,): eps}).value == pytest.approx(want, abs=1e-8)

    def test_thm5_against_dual(self):
        test = thm5_test(self.ch, self.J, 0.1)
        assert test.value == pytest.approx(EXAMPLE2_IH[0.1], abs=1e-9)
        assert thm5_rate_bound(self.ch, self.J, 0.1, 0.3).value == pytest.approx(test.value - math.log2(4 * 0.3 / 0.04), abs=1e-9)

    def test_diagonal_cq_matches_classical(self):
        rng = np.random.default_rng(3)
        G = AbelianGroup.cyclic(4)
        W = rng.dirichlet(np.ones(3), size=4)
        classical = ClassicalChannel(G, W)
        cq = classical.as_cq()
        J = InputGroup.from_counts(G, {(2, 2): 1})
        for e in (0.05, 0.3):
            assert oneshot_converse(cq, J, e) == pytest.approx(oneshot_converse(classical, J, e), abs=1e-8)

    def test_quaternary_thm5_against_dual(self):
        ch = quaternary_qubit_channel()
        J = InputGroup.from_counts(ch.group, {(2, 2): 1})
        ens = InputEnsemble.regular(J)
        want = dh_dual(list(cq_joint(ens, ch).operators()), list(cq_mixture_pi_J(ens, ch).operators()), 0.1)
        assert thm5_test(ch, J, 0.1).value == pytest.approx(want, abs=1e-8)

    def test_relabel_invariance(self):
        ch = quaternary_qubit_channel()
        J = InputGroup.from_counts(ch.group, {(2, 2): 1})
        U = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
        rotated = CQChannel(ch.group, np.array([U @ s @ U.conj().T for s in ch.states]))
        assert oneshot_converse(rotated, J, 0.1) == pytest.approx(oneshot_converse(ch, J, 0.1), abs=1e-8)


@given(st.floats(0.0, 20.0), st.floats(1e-4, 0.5), st.floats(0.0, 3.0))
def test_srm_bound_is_the_minimum(d, eps, rate):
    got = srm_error_bound(d, eps, rate)
    x = 2.0 ** (rate - d)
    cs = np.exp(np.linspace(-12, 12, 4001))
    grid = ((1 + cs) * eps + (2 + cs + 1 / cs) * x).min()
    assert got <= grid + 1e-12
    assert got >= grid * (1 - 1e-4) - 1e-12


def test_report_rows_and_json():
    ch = octonary_channel()
    J = InputGroup.from_counts(ch.group, {(2, 2): 1})
    rep = oneshot_report(ch, J, 0.2, 0.5)
    assert [r["T_size"] for r in rep.rows] == [2, 1]
    assert [r["T_size_product_form"] for r in rep.rows] == [4, 2]
    body = rep.to_json()
    assert body["rate"] == 2.0 and body["converse_rate"] >= 0
    assert set(body) >= {"profiles", "thm1_error_bound", "thm2_rate_bound", "converse_rate", "ensemble", "allocation"}
    cq = oneshot_report(binary_qubit_channel(), InputGroup.from_counts(AbelianGroup.cyclic(2), {(2, 1): 1}), 0.01)
    assert cq.to_json()["quantum"] is True
