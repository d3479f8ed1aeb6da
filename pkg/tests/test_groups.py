import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcap.groups import (
    AbelianGroup,
    CapExceededError,
    HomomorphismTable,
    InputGroup,
    Subgroup,
    ValidationError,
    coset_split,
    enumerate_etas,
    enumerate_theta_hats,
    generator_choices,
    group_from_json,
    input_group_from_json,
    iter_codes,
    omega_theta,
    partition_into_T_theta,
    sample_code,
    sample_generators,
    t_theta_bound,
    t_theta_size,
    theta_map,
    transversal,
)


def z(*orders):
    """Direct sum of cyclic prime-power groups given by their orders."""
    spec = {}
    for n in orders:
        (p, r), = AbelianGroup.cyclic(n).factors
        spec[(p, r)] = spec.get((p, r), 0) + 1
    return AbelianGroup.from_primary_spec([(p, r, m) for (p, r), m in spec.items()])


class TestConstruction:
    def test_mixed_primary_spec(self):
        G = AbelianGroup.from_primary_spec([(2, 2, 1), (3, 1, 1), (3, 2, 2)])
        assert G.labels == ((2, 2, 1), (3, 1, 1), (3, 2, 1), (3, 2, 2))
        assert len(G.digit_index) == 7
        assert G.order == 4 * 3 * 81
        assert G.zeta == 2 + 1 + 2 + 2

    def test_z2(self):
        G = AbelianGroup.from_primary_spec([(2, 1, 1)])
        assert G.order == 2 and G.zeta == 1 and G.s_index == ((2, 1),)

    def test_z8_index_sets(self):
        G = AbelianGroup.from_primary_spec([(2, 3, 1)])
        assert G.max_exponent(2) == 3
        assert G.s_index == ((2, 1), (2, 2), (2, 3))

    @pytest.mark.parametrize(
        "spec",
        [[(4, 1, 1)], [(2, 0, 1)], [(2, 1, 0)], [(2, 1, 1), (2, 1, 2)], [(1, 1, 1)]],
    )
    def test_rejects_bad_specs(self, spec):
        with pytest.raises(ValidationError):
            AbelianGroup.from_primary_spec(spec)

    def test_cyclic_uses_primary_split(self):
        assert AbelianGroup.cyclic(10).factors == ((2, 1), (5, 1))
        assert AbelianGroup.cyclic(12).factors == ((2, 2), (3, 1))

    def test_enumeration_cap(self, monkeypatch):
        monkeypatch.setenv("GCAP_CAP", "100")
        with pytest.raises(CapExceededError):
            AbelianGroup.cyclic(2).power(7).elements()

    def test_json_round_trip(self):
        G = AbelianGroup.from_primary_spec([(2, 2, 1), (3, 1, 2)])
        assert group_from_json(G.to_json()) == G
        J = InputGroup.from_counts(G, {(2, 1): 2, (3, 1): 1})
        assert input_group_from_json(G, J.to_json()) == J

    def test_integer_labels_follow_crt(self):
        G = AbelianGroup.cyclic(10)
        lab = G.integer_labels()
        for x in range(10):
            assert tuple(G.element(lab[x])) == (x % 2, x % 5)

    @given(st.lists(st.sampled_from([2, 3, 4, 5, 8, 9]), min_size=1, max_size=3))
    def test_order_and_zeta_invariants(self, orders):
        G = z(*orders)
        assert G.order == math.prod(p**r for p, r, _ in G.labels)
        assert G.zeta == sum(r for _, r, _ in G.labels)
        assert len(G.elements()) == G.order


class TestThetaProfiles:
    def test_z4_in_z8(self):
        G = AbelianGroup.cyclic(8)
        J = InputGroup.from_counts(G, {(2, 2): 1})
        thetas = enumerate_theta_hats(J)
        assert thetas == [(0,), (1,)]
        assert [t_theta_size(J, t) for t in thetas] == [2, 1]

    def test_z2(self):
        G = AbelianGroup.cyclic(2)
        assert enumerate_theta_hats(InputGroup.from_counts(G, {(2, 1): 1})) == [(0,)]

    def test_three_coordinates(self):
        G = AbelianGroup.cyclic(8)
        J = InputGroup.from_counts(G, {(2, 1): 1, (2, 2): 1, (2, 3): 1})
        assert len(enumerate_theta_hats(J)) == 2 * 3 * 4 - 1

    def test_omega_values(self):
        G = AbelianGroup.cyclic(8)
        J4 = InputGroup.from_counts(G, {(2, 2): 1})
        assert omega_theta((0,), J4) == 0
        assert omega_theta((1,), J4) == pytest.approx(0.5, abs=1e-15)
        J24 = InputGroup.from_counts(G, {(2, 1): 1, (2, 2): 1})
        assert omega_theta((1, 1), J24) == pytest.approx(2 / 3, abs=1e-15)
        assert omega_theta((1, 2), J24) == pytest.approx(1.0, abs=1e-15)

    def test_all_s_has_one_element(self):
        G = z(4, 9)
        J = InputGroup.from_counts(G, {(2, 2): 2, (3, 1): 1})
        s = tuple(s for _, s in J.active)
        assert t_theta_size(J, s) == 1

    def test_theta_map_examples(self):
        G = z(4, 8)
        J = InputGroup.from_counts(G, {(2, 1): 1, (2, 2): 1, (2, 3): 1})
        assert theta_map(J, (1, 1, 2)).exps == (1, 2)
        assert theta_map(J, (0, 0, 0)).exps == (0, 0)
        G8 = AbelianGroup.cyclic(8)
        assert theta_map(InputGroup.from_counts(G8, {(2, 2): 1}), (1,)).exps == (2,)

    def test_theta_map_inactive_prime_is_trivial(self):
        G = AbelianGroup.cyclic(6)
        J = InputGroup.from_counts(G, {(2, 1): 1})
        H = theta_map(J, (0,))
        assert H.exps == (0, 1) and H.order == 2

    def test_partition_z4(self):
        G = AbelianGroup.cyclic(4)
        J = InputGroup.from_counts(G, {(2, 2): 1})
        parts = partition_into_T_theta(J, [0])
        assert {t: sorted(v.ravel().tolist()) for t, v in parts.items()} == {(0,): [1, 3], (1,): [2], (2,): [0]}

    def test_partition_z2_z4(self):
        G = z(2, 4)
        J = InputGroup.from_counts(G, {(2, 1): 1, (2, 2): 1})
        parts = partition_into_T_theta(J, [1, 3])
        sizes = {t: len(v) for t, v in parts.items()}
        # hand count: a difference (d1, d2) has profile (v(d1), v(d2)) with v(0) = s
        assert sizes == {(0, 0): 2, (0, 1): 1, (0, 2): 1, (1, 0): 2, (1, 1): 1, (1, 2): 1}
        assert sum(sizes.values()) == 8

    @given(
        st.dictionaries(st.sampled_from([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]), st.integers(1, 2), min_size=1, max_size=3),
        st.data(),
    )
    def test_partition_identity(self, counts, data):
        G = AbelianGroup.from_primary_spec([(2, 3, 1), (3, 2, 1), (5, 1, 1)])
        J = InputGroup.from_counts(G, counts)
        JG = J.as_group
        a = data.draw(st.integers(0, JG.order - 1))
        parts = partition_into_T_theta(J, JG.element(a))
        assert sum(len(v) for v in parts.values()) == J.order
        for t, v in parts.items():
            assert len(v) == t_theta_size(J, t)
        assert sum(t_theta_size(J, t) for t in enumerate_theta_hats(J)) == J.order - 1

    @given(st.dictionaries(st.sampled_from([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]), st.integers(1, 3), min_size=1, max_size=4))
    def test_product_form_rate_identity(self, counts):
        G = AbelianGroup.from_primary_spec([(2, 3, 1), (3, 2, 1), (5, 1, 1)])
        J = InputGroup.from_counts(G, counts)
        for t in enumerate_theta_hats(J):
            assert math.log2(t_theta_bound(J, t)) == pytest.approx((1 - omega_theta(t, J)) * J.rate(), abs=1e-9)

    @given(st.dictionaries(st.sampled_from([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)]), st.integers(0, 2), min_size=1, max_size=3))
    def test_nesting(self, counts):
        G = AbelianGroup.from_primary_spec([(2, 3, 1), (3, 2, 1)])
        if not any(counts.values()):
            counts = {(2, 1): 1}
        J = InputGroup.from_counts(G, counts)
        for eta in enumerate_etas(J):
            Heta = theta_map(J, eta=eta)
            for t in enumerate_theta_hats(J, include_all_s=True):
                assert theta_map(J, t, eta).is_subgroup_of(Heta)


class TestCosets:
    def test_split_z8(self):
        G = AbelianGroup.cyclic(8)
        rep, inner = coset_split([5], Subgroup(G, (1,)))
        assert rep.tolist() == [1] and inner.tolist() == [4]

    def test_split_extremes(self):
        G = z(4, 9)
        x = np.array([3, 7])
        rep, inner = coset_split(x, Subgroup.whole(G))
        assert rep.tolist() == [0, 0] and inner.tolist() == [3, 7]
        rep, inner = coset_split(x, Subgroup.trivial(G))
        assert rep.tolist() == [3, 7] and inner.tolist() == [0, 0]

    def test_transversals(self):
        G = AbelianGroup.cyclic(8)
        whole = Subgroup.whole(G)
        assert transversal(whole, Subgroup(G, (2,))).ravel().tolist() == [0, 1, 2, 3]
        assert transversal(whole, whole).ravel().tolist() == [0]
        G48 = z(4, 8)
        assert len(transversal(Subgroup.whole(G48), Subgroup(G48, (1, 2)))) == 8

    def test_transversal_needs_nesting(self):
        G = AbelianGroup.cyclic(8)
        with pytest.raises(ValidationError):
            transversal(Subgroup(G, (2,)), Subgroup(G, (1,)))

    @given(st.lists(st.sampled_from([2, 4, 3, 9, 8]), min_size=1, max_size=2), st.data())
    def test_split_is_bijection(self, orders, data):
        G = z(*orders)
        exps = tuple(data.draw(st.integers(0, r)) for _, r, _ in G.labels)
        H = Subgroup(G, exps)
        elems = G.elements()
        rep, inner = coset_split(elems, H)
        assert np.all(H.contains(inner))
        assert np.array_equal(G.add(rep, inner), elems)
        assert len({tuple(r) for r in rep}) == G.order // H.order


class TestHomomorphisms:
    def test_z4_to_z8(self):
        G = AbelianGroup.cyclic(8)
        J = InputGroup.from_counts(G, {(2, 2): 1})
        phi = HomomorphismTable(J, 1, np.array([[2]]), np.array([0]))
        assert phi.apply([3]).tolist() == [6]
        assert phi.apply([0]).tolist() == [0]

    def test_rejects_illegal_generator(self):
        G = AbelianGroup.cyclic(8)
        J = InputGroup.from_counts(G, {(2, 2): 1})
        with pytest.raises(ValidationError):
            HomomorphismTable(J, 1, np.array([[1]]), np.array([0]))

    def test_cross_prime_generators_vanish(self):
        G = AbelianGroup.cyclic(6)
        J = InputGroup.from_counts(G, {(2, 1): 1, (3, 1): 1})
        assert [c.tolist() for c in generator_choices(J)] == [[0, 1], [0], [0], [0, 1, 2]]

    @pytest.mark.parametrize("orders,counts", [((8,), {(2, 2): 1}), ((2, 4), {(2, 1): 1, (2, 2): 1}), ((4, 3), {(2, 1): 1, (3, 1): 1})])
    def test_additive_exhaustive(self, orders, counts):
        G = z(*orders)
        J = InputGroup.from_counts(G, counts)
        JG = J.as_group
        elems = JG.elements()
        for phi in itertools.islice(iter_codes(J), 0, None, G.order):
            for a, b in itertools.product(elems, repeat=2):
                lhs = phi.apply(JG.add(a, b))
                rhs = G.add(phi.apply(a), phi.apply(b))
                assert np.array_equal(lhs, rhs)

    def test_sampling_is_seeded(self):
        G = AbelianGroup.cyclic(8)
        J = InputGroup.from_counts(G, {(2, 2): 1})
        a = sample_code(J, 2, np.random.default_rng(3))
        b = sample_code(J, 2, np.random.default_rng(3))
        assert np.array_equal(a.generators, b.generators) and np.array_equal(a.dither, b.dither)

    def test_generator_frequencies_uniform(self):
        G = AbelianGroup.cyclic(8)
        J = InputGroup.from_counts(G, {(2, 2): 1})
        gens = sample_generators(J, 1, 100_000, np.random.default_rng(0)).ravel()
        values, counts = np.unique(gens, return_counts=True)
        assert values.tolist() == [0, 2, 4, 6]
        # chi-square against uniform, 3 degrees of freedom: 99.9% quantile is 16.27
        chi2 = ((counts - 25_000) ** 2 / 25_000).sum()
        assert chi2 < 16.27

    def test_z2_generators(self):
        G = AbelianGroup.cyclic(2)
        J = InputGroup.from_counts(G, {(2, 1): 1})
        gens = sample_generators(J, 1, 1000, np.random.default_rng(1)).ravel()
        assert set(gens.tolist()) == {0, 1}
