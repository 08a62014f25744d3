"""Joint tables, exact and approximate MI, profiles, memory readout."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.metrics import mutual_info_score

import reference
from hdmem import (
    AlgebraParams,
    JointTable,
    RngStream,
    State,
    approx_mi_from_distance,
    bind,
    distance,
    joint_distribution,
    mean_activity,
    mi_memory,
    mi_profile,
    mutual_information_approx,
    mutual_information_exact,
    perturb,
    random_qstate,
)
from hdmem.sequences import memory_state

N = 10000


def bit_pairs(max_dim: int = 200):
    def build(n):
        one = st.lists(st.integers(0, 1), min_size=n, max_size=n)
        return st.tuples(one, one)

    return st.integers(1, max_dim).flatmap(build)


def as_states(pair):
    return (
        State.from_bits(np.asarray(pair[0], dtype=np.uint8)),
        State.from_bits(np.asarray(pair[1], dtype=np.uint8)),
    )


def pinned_pair(seed, q=0.5, eps=None, n=N):
    params = AlgebraParams(dimension=n, q=q, theta=0.5, seed=seed)
    rng = RngStream(seed, (70,))
    x = random_qstate(params, rng)
    if eps is None:
        y = random_qstate(params, rng)
    else:
        y = perturb(x, eps, RngStream(seed, (71,)))
    return x, y


class TestJointTable:
    @given(pair=bit_pairs())
    def test_counts_match_reference(self, pair):
        x, y = as_states(pair)
        table = joint_distribution(x, y)
        n00, n01, n10, n11 = reference.naive_joint_counts(pair[0], pair[1])
        assert (table.n00, table.n01, table.n10, table.n11) == (n00, n01, n10, n11)
        assert table.dimension == x.dimension

    @given(pair=bit_pairs())
    def test_marginals_recover_activities_exactly(self, pair):
        x, y = as_states(pair)
        table = joint_distribution(x, y)
        assert table.activity_x == mean_activity(x)
        assert table.activity_y == mean_activity(y)

    @given(pair=bit_pairs())
    def test_fractions_sum_to_one(self, pair):
        table = joint_distribution(*as_states(pair))
        total = table.p00 + table.p01 + table.p10 + table.p11
        assert total == pytest.approx(1.0, abs=1e-12)
        assert min(table.p00, table.p01, table.p10, table.p11) >= 0.0

    def test_identical_states(self):
        x = State.from_bits([1, 0, 1, 1])
        table = joint_distribution(x, x)
        assert table.p01 == table.p10 == 0.0
        assert table.p11 == mean_activity(x)

    def test_complement(self):
        x = State.from_bits([1, 0, 1, 1])
        comp = State.from_bits([0, 1, 0, 0])
        table = joint_distribution(x, comp)
        assert table.p00 == table.p11 == 0.0

    def test_perturbed_pair_matches_flip_model(self):
        q, eps = 1 / 3, 0.2
        x, y = pinned_pair(seed=11, q=q, eps=eps)
        m = joint_distribution(x, y).as_matrix()
        expected = np.array(
            [[(1 - q) * (1 - eps), (1 - q) * eps], [q * eps, q * (1 - eps)]]
        )
        assert np.all(np.abs(m - expected) <= 0.015)

    def test_validation(self):
        with pytest.raises(ValueError, match="non-negative"):
            JointTable(-1, 1, 0, 4, 4)
        with pytest.raises(ValueError, match="sum"):
            JointTable(1, 1, 1, 1, 5)
        with pytest.raises(ValueError, match="dimension mismatch"):
            joint_distribution(State.from_bits([1]), State.from_bits([1, 0]))


class TestExactMI:
    @given(pair=bit_pairs())
    def test_matches_entropy_route(self, pair):
        x, y = as_states(pair)
        assert mutual_information_exact(x, y) == pytest.approx(
            reference.naive_mi(pair[0], pair[1]), abs=1e-12
        )

    @given(pair=bit_pairs())
    def test_matches_sklearn(self, pair):
        x, y = as_states(pair)
        expected = float(mutual_info_score(pair[0], pair[1]))
        assert mutual_information_exact(x, y) == pytest.approx(expected, abs=1e-10)

    @given(pair=bit_pairs())
    def test_symmetric_bit_exact(self, pair):
        x, y = as_states(pair)
        assert mutual_information_exact(x, y) == mutual_information_exact(y, x)

    @given(pair=bit_pairs())
    def test_non_negative(self, pair):
        assert mutual_information_exact(*as_states(pair)) >= 0.0

    @given(bits=st.lists(st.integers(0, 1), min_size=1, max_size=200))
    def test_self_mi_is_entropy(self, bits):
        x = State.from_bits(bits)
        a = mean_activity(x)
        assert mutual_information_exact(x, x) == pytest.approx(
            reference.entropy_nats([a, 1.0 - a]), abs=1e-12
        )

    def test_constant_state_carries_nothing(self):
        zeros = State.zeros(64)
        other = State.from_bits([1, 0] * 32)
        assert mutual_information_exact(zeros, other) == 0.0

    def test_independent_states_near_zero(self):
        x, y = pinned_pair(seed=12)
        assert mutual_information_exact(x, y) <= 0.001

    def test_identical_dense_states_near_ln2(self):
        x, _ = pinned_pair(seed=13)
        assert mutual_information_exact(x, x) == pytest.approx(
            math.log(2), abs=0.01
        )

    def test_quarter_perturbation_closed_form(self):
        x, y = pinned_pair(seed=14, eps=0.25)
        expected = math.log(2) - reference.binary_entropy(0.25)
        assert expected == pytest.approx(0.1308, abs=1e-4)
        assert mutual_information_exact(x, y) == pytest.approx(expected, abs=0.01)

    def test_sparse_perturbation_closed_form(self):
        q, eps = 1 / 3, 0.2
        x, y = pinned_pair(seed=15, q=q, eps=eps)
        expected = reference.perturb_mi_closed_form(q, eps)
        assert mutual_information_exact(x, y) == pytest.approx(expected, abs=0.01)

    def test_large_pinned_pair_matches_sklearn(self):
        x, y = pinned_pair(seed=16, eps=0.1)
        expected = float(
            mutual_info_score(x.to_bits(), y.to_bits())
        )
        assert mutual_information_exact(x, y) == pytest.approx(expected, abs=1e-10)


class TestApproxMI:
    def test_known_values(self):
        assert approx_mi_from_distance(0.5, 0.3) == 0.0
        assert approx_mi_from_distance(0.25, 0.5) == pytest.approx(0.125)
        assert approx_mi_from_distance(0.0, 0.5) == pytest.approx(0.5)

    @given(d=st.floats(0.0, 1.0), q=st.floats(0.01, 0.99))
    def test_closed_form(self, d, q):
        assert approx_mi_from_distance(d, q) == pytest.approx(
            8.0 * q * (1.0 - q) * (d - 0.5) ** 2, abs=1e-15
        )

    def test_validation(self):
        with pytest.raises(ValueError, match="q"):
            approx_mi_from_distance(0.5, 0.0)
        with pytest.raises(ValueError, match="q"):
            approx_mi_from_distance(0.5, 1.0)
        with pytest.raises(ValueError, match="distance"):
            approx_mi_from_distance(-0.01, 0.5)
        with pytest.raises(ValueError, match="distance"):
            approx_mi_from_distance(1.01, 0.5)

    @given(pair=bit_pairs())
    def test_distance_and_activity_forms_agree_bit_exact(self, pair):
        # both routes share the same popcount, so the results are the
        # same float, not merely close
        x, y = as_states(pair)
        via_distance = approx_mi_from_distance(distance(x, y), 0.4)
        via_activity = approx_mi_from_distance(
            1.0 - mean_activity(bind(x, y)), 0.4
        )
        assert via_distance == via_activity
        assert mutual_information_approx(x, y, 0.4) == via_distance

    def test_agreement_band_with_exact(self):
        # quadratic form is tight near d = 1/2, loose at the ends
        for eps in (0.3, 0.4, 0.5, 0.6, 0.7):
            x, y = pinned_pair(seed=17, eps=eps)
            gap = abs(
                mutual_information_exact(x, y)
                - mutual_information_approx(x, y, 0.5)
            )
            assert gap <= 0.01

    def test_endpoint_gap(self):
        x, _ = pinned_pair(seed=18)
        gap = mutual_information_exact(x, x) - mutual_information_approx(
            x, x, 0.5
        )
        assert gap == pytest.approx(math.log(2) - 0.5, abs=0.01)


class TestMIProfile:
    def test_orders_descending(self):
        x, y = pinned_pair(seed=19, n=2000)
        profile = mi_profile(x, [("self", x), ("other", y)])
        assert profile.best == "self"
        assert profile.labels == ["self", "other"]
        assert profile.entries[0][1] >= profile.entries[1][1]

    def test_ties_break_by_label(self):
        x = State.from_bits([1, 0, 1, 0])
        profile = mi_profile(x, [("z", x), ("a", x)])
        assert profile.labels == ["a", "z"]

    def test_value_lookup(self):
        x, y = pinned_pair(seed=20, n=2000)
        profile = mi_profile(x, [("a", x), ("b", y)])
        assert profile.value("b") == mutual_information_exact(x, y)
        with pytest.raises(KeyError):
            profile.value("missing")

    def test_all_entries_non_negative(self):
        x, y = pinned_pair(seed=21, n=2000)
        profile = mi_profile(x, [("a", x), ("b", y)])
        assert all(mi >= 0.0 for _, mi in profile.entries)

    def test_approx_mode(self):
        x, y = pinned_pair(seed=22, n=2000)
        profile = mi_profile(x, [("a", x), ("b", y)], mode="approx", q=0.5)
        assert profile.value("b") == mutual_information_approx(x, y, 0.5)

    def test_validation(self):
        x = State.from_bits([1, 0])
        with pytest.raises(ValueError, match="non-empty"):
            mi_profile(x, [])
        with pytest.raises(ValueError, match="requires q"):
            mi_profile(x, [("a", x)], mode="approx")
        with pytest.raises(ValueError, match="mode"):
            mi_profile(x, [("a", x)], mode="fuzzy")


@pytest.fixture(scope="module")
def small_memory():
    params = AlgebraParams(dimension=2000, q=1 / 3, theta=0.5, seed=23)
    rng = RngStream(23, (0,))
    items = [random_qstate(params, rng) for _ in range(4)]
    eta = random_qstate(params, RngStream(23, (1,)))
    memory = memory_state(items, eta, params, RngStream(23, (2,)))
    return memory, items[1]


class TestMIMemory:
    def test_weighted_sum(self, small_memory):
        memory, probe = small_memory
        mi_l = mutual_information_exact(memory.left, probe)
        mi_r = mutual_information_exact(memory.right, probe)
        got = mi_memory(memory, probe, rho_r=0.7, rho_l=0.2)
        assert got == pytest.approx(0.7 * mi_r + 0.2 * mi_l, rel=1e-12)

    def test_reductions_exact(self, small_memory):
        memory, probe = small_memory
        assert mi_memory(memory, probe, rho_r=1.0, rho_l=0.0) == (
            mutual_information_exact(memory.right, probe)
        )
        assert mi_memory(memory, probe, rho_r=0.0, rho_l=1.0) == (
            mutual_information_exact(memory.left, probe)
        )

    def test_linearity_in_weights(self, small_memory):
        memory, probe = small_memory
        for alpha in (0.5, 0.25):
            full = mi_memory(memory, probe, rho_r=0.8, rho_l=0.6)
            scaled = mi_memory(
                memory, probe, rho_r=alpha * 0.8, rho_l=alpha * 0.6
            )
            assert scaled == pytest.approx(alpha * full, rel=1e-12)

    def test_approx_mode_defaults_to_memory_q(self, small_memory):
        memory, probe = small_memory
        implicit = mi_memory(memory, probe, mode="approx")
        explicit = mi_memory(memory, probe, mode="approx", q=memory.params.q)
        assert implicit == explicit

    def test_validation(self, small_memory):
        memory, probe = small_memory
        with pytest.raises(ValueError, match="rho_r"):
            mi_memory(memory, probe, rho_r=1.2)
        with pytest.raises(ValueError, match="rho_l"):
            mi_memory(memory, probe, rho_l=-0.1)
        with pytest.raises(ValueError, match="mode"):
            mi_memory(memory, probe, mode="fuzzy")
