import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import binomtest

from gcap.catalog import binary_qubit_channel, bsc, octonary_channel, symmetric_channel
from gcap.channels import ClassicalChannel, CQChannel
from gcap.ensemble import SimReport, lemma2_exhaustive, simulate_classical, simulate_cq_srm, srm_code_error, wilson_interval
from gcap.groups import AbelianGroup, InputGroup, ValidationError, enumerate_theta_hats


def exact_ml_error(W):
    """Average ML error (ties split evenly) over u -> u g + v on Z_n with g, v uniform."""
    n = W.shape[0]
    total = Fraction(0)
    for g, v in itertools.product(range(n), repeat=2):
        book = [(u * g + v) % n for u in range(n)]
        for u in range(n):
            for y in range(W.shape[1]):
                like = [W[x, y] for x in book]
                top = [i for i, val in enumerate(like) if val == max(like)]
                ok = Fraction(1, len(top)) if u in top else 0
                total += Fraction(W[book[u], y]) * (1 - ok)
    return float(total / (n * n * n))


@given(st.integers(0, 500), st.integers(1, 500))
def test_wilson_matches_scipy(k, n):
    k = min(k, n)
    ci = binomtest(k, n).proportion_ci(method="wilson")
    lo, hi = wilson_interval(k, n)
    assert lo == pytest.approx(ci.low, abs=1e-9) and hi == pytest.approx(ci.high, abs=1e-9)


def test_wilson_rejects_empty():
    with pytest.raises(ValidationError):
        wilson_interval(0, 0)


@pytest.mark.parametrize(
    "orders,counts",
    [([(2, 2, 1)], {(2, 2): 1}), ([(2, 3, 1)], {(2, 2): 1}), ([(2, 1, 1), (2, 2, 1)], {(2, 1): 1, (2, 2): 1})],
)
def test_lemma2_exhaustive(orders, counts):
    G = AbelianGroup.from_primary_spec(orders)
    J = InputGroup.from_counts(G, counts)
    for theta in enumerate_theta_hats(J):
        passed, info = lemma2_exhaustive(J, theta)
        assert passed
        assert all(f == info["expected"] for f in info["frequencies"].values())


def test_lemma2_frequencies_for_z4_in_z8():
    G = AbelianGroup.cyclic(8)
    J = InputGroup.from_counts(G, {(2, 2): 1})
    assert lemma2_exhaustive(J, (0,))[1]["expected"] == Fraction(1, 32)
    assert lemma2_exhaustive(J, (1,))[1]["expected"] == Fraction(1, 16)


class TestClassicalSimulation:
    def test_seeded_runs_repeat(self):
        ch = bsc(0.1)
        J = InputGroup.from_counts(ch.group, {(2, 1): 1})
        a = simulate_classical(ch, J, 0.1, trials=30_000, seed=4)
        b = simulate_classical(ch, J, 0.1, trials=30_000, seed=4)
        c = simulate_classical(ch, J, 0.1, trials=30_000, seed=5)
        assert a.errors == b.errors and a.errors != c.errors

    @pytest.mark.parametrize("ch", [bsc(0.1), symmetric_channel(4, 0.2), symmetric_channel(3, 0.3)])
    def test_ml_matches_exact_ensemble_error(self, ch):
        n = ch.group.order
        J = InputGroup.from_counts(ch.group, dict.fromkeys(ch.group.s_index[-1:], 1))
        assert J.order == n
        rep = simulate_classical(ch, J, 0.1, decoder="ml", trials=60_000, seed=1)
        exact = exact_ml_error(ch.W)
        sigma = np.sqrt(exact * (1 - exact) / rep.trials)
        assert abs(rep.error_rate - exact) < 4 * sigma

    def test_ml_beats_region(self):
        ch = octonary_channel()
        J = InputGroup.from_counts(ch.group, {(2, 2): 1})
        ml = simulate_classical(ch, J, 0.2, decoder="ml", trials=20_000, seed=2)
        region = simulate_classical(ch, J, 0.2, decoder="region", trials=20_000, seed=2)
        assert ml.error_rate <= region.error_rate + 3 * region.width

    def test_report_json(self):
        ch = bsc(0.1)
        J = InputGroup.from_counts(ch.group, {(2, 1): 1})
        body = simulate_classical(ch, J, 0.1, trials=1000).to_json()
        assert set(body) >= {"trials", "empirical_error", "wilson95", "bound", "seed", "decoder", "allocation"}
        assert body["wilson95"][0] <= body["empirical_error"] <= body["wilson95"][1]

    def test_validation(self):
        ch = bsc(0.1)
        J = InputGroup.from_counts(ch.group, {(2, 1): 1})
        with pytest.raises(ValidationError):
            simulate_classical(ch, J, 0.1, decoder="guess")
        with pytest.raises(ValidationError):
            simulate_classical(ch, J, 0.1, trials=0)
        with pytest.raises(ValidationError):
            simulate_classical(ch, J)


class TestSquareRoot:
    def test_never_beats_ml_on_commuting_states(self):
        rng = np.random.default_rng(6)
        G = AbelianGroup.cyclic(4)
        W = rng.dirichlet(np.ones(4), size=4)
        cq = ClassicalChannel(G, W).as_cq()
        ops = np.array([np.diag(rng.uniform(0, 1, 4)) for _ in range(4)], dtype=complex)
        for book in itertools.product(range(4), repeat=3):
            book = np.array(book)
            ml_success = sum(W[book, y].max() for y in range(4)) / len(book)
            assert srm_code_error(cq, ops, book) >= 1 - ml_success - 1e-12

    def test_perfect_channel_is_decoded(self):
        G = AbelianGroup.cyclic(2)
        states = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], dtype=complex)
        ch = CQChannel(G, states)
        assert srm_code_error(ch, states, np.array([0, 1])) == pytest.approx(0.0, abs=1e-12)

    def test_example2_run(self):
        ch = binary_qubit_channel()
        J = InputGroup.from_counts(ch.group, {(2, 1): 1})
        rep = simulate_cq_srm(ch, J, 0.1, trials=100, seed=0)
        assert rep.decoder == "srm" and 0 <= rep.error_rate <= 1
        assert rep.meta["type_i"] == pytest.approx(0.1, abs=1e-9)
        again = simulate_cq_srm(ch, J, 0.1, trials=100, seed=0)
        assert again.errors == rep.errors

    def test_limits(self):
        G = AbelianGroup.cyclic(2)
        big = CQChannel(G, np.array([np.eye(9) / 9] * 2, dtype=complex))
        with pytest.raises(ValidationError):
            simulate_cq_srm(big, InputGroup.from_counts(G, {(2, 1): 1}), 0.1)


def test_within_bound_uses_wilson_width():
    rep = SimReport(1000, 120, 0.1, 0, "ml")
    assert rep.width == pytest.approx(np.subtract(*rep.interval[::-1]))
    assert rep.within_bound(widths=3) == (0.12 <= 0.1 + 3 * rep.width)
