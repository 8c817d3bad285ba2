import itertools
import math

import numpy as np
import pytest
from scipy.stats import chisquare

from rdlab.sampler import (
    PermutationSum,
    RegularDigraph,
    SwitchChain,
    canfield_mckay_log_prob,
    count_regular_matrices,
    default_burn_in,
    from_edge_list,
    sample_bernoulli,
    sample_rrd,
    to_edge_list,
)


def brute_force_count(n, d):
    """Oracle: filter all 2^(n^2) binary matrices on row/column sums."""
    count = 0
    for bits in itertools.product((0, 1), repeat=n * n):
        m = np.array(bits).reshape(n, n)
        if (m.sum(0) == d).all() and (m.sum(1) == d).all():
            count += 1
    return count


def enumerate_m3_1():
    """Oracle: M_3(1) is exactly the six 3x3 permutation matrices."""
    mats = []
    for perm in itertools.permutations(range(3)):
        m = np.zeros((3, 3), dtype=np.uint8)
        m[np.arange(3), perm] = 1
        mats.append(m)
    return mats


class TestSampleRrd:
    def test_n2_d1_both_methods(self):
        for method in (SwitchChain(), PermutationSum()):
            g = sample_rrd(2, 1, method, seed=3)
            assert g.adjacency.tolist() in (
                [[1, 0], [0, 1]],
                [[0, 1], [1, 0]],
            )

    def test_regularity_invariant(self):
        for seed in range(5):
            g = sample_rrd(100, 50, SwitchChain(), seed=seed)
            assert (g.adjacency.sum(0) == 50).all()
            assert (g.adjacency.sum(1) == 50).all()

    def test_permutation_sum_regularity(self):
        g = sample_rrd(30, 3, PermutationSum(), seed=7)
        g.validate()

    def test_permutation_sum_budget_exhausted(self):
        # d = n-1 forces support collisions essentially always
        with pytest.raises(RuntimeError):
            sample_rrd(6, 5, PermutationSum(max_rejections=5), seed=0)

    def test_invalid_degree(self):
        with pytest.raises(ValueError):
            sample_rrd(5, 0)
        with pytest.raises(ValueError):
            sample_rrd(5, 5)

    def test_switch_chain_uniformity_n3_d1(self):
        """6000 draws over the six elements of M_3(1); chi-square at 0.01."""
        elements = enumerate_m3_1()
        counts = np.zeros(6)
        for i in range(6000):
            g = sample_rrd(3, 1, SwitchChain(), seed=1000 + i)
            for k, m in enumerate(elements):
                if (g.adjacency == m).all():
                    counts[k] += 1
                    break
            else:
                pytest.fail("sample outside M_3(1)")
        _, pvalue = chisquare(counts)
        assert pvalue > 0.01

    def test_determinism(self):
        a = sample_rrd(40, 5, SwitchChain(), seed=9).adjacency
        b = sample_rrd(40, 5, SwitchChain(), seed=9).adjacency
        assert (a == b).all()


class TestSampleBernoulli:
    def test_degenerate(self):
        assert sample_bernoulli(5, 0.0, 1).sum() == 0
        assert sample_bernoulli(5, 1.0, 1).sum() == 25

    def test_density(self):
        # binomial tail: 10^4 entries, density within 0.5 +/- 0.02 w.p. 99%
        m = sample_bernoulli(100, 0.5, seed=42)
        assert abs(m.mean() - 0.5) < 0.02

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            sample_bernoulli(5, 1.5)


class TestCounting:
    def test_permutations(self):
        for n in range(2, 7):
            assert count_regular_matrices(n, 1) == math.factorial(n)

    def test_complement_symmetry(self):
        for n in range(3, 7):
            for d in range(1, n):
                assert count_regular_matrices(n, d) == count_regular_matrices(
                    n, n - d
                )

    def test_m3_1_is_permutations(self):
        assert count_regular_matrices(3, 1) == len(enumerate_m3_1())

    def test_m4_2_matches_brute_force(self):
        assert count_regular_matrices(4, 2) == brute_force_count(4, 2)

    def test_m4_3_complement(self):
        assert count_regular_matrices(4, 3) == 24

    def test_size_limit(self):
        with pytest.raises(ValueError):
            count_regular_matrices(9, 2)


class TestCanfieldMcKay:
    def test_direct_substitution(self):
        expected = 0.5 * math.log(2 * math.pi * 2500) - 100 * math.log(
            2 * math.pi * 25
        )
        assert canfield_mckay_log_prob(100, 50) == pytest.approx(expected)

    def test_symmetry(self):
        assert canfield_mckay_log_prob(10, 3) == pytest.approx(
            canfield_mckay_log_prob(10, 7)
        )

    def test_against_exact_enumeration(self):
        # exact log P(E_{4,2}) with p = 1/2 from the counting oracle
        exact = math.log(count_regular_matrices(4, 2)) + 16 * math.log(0.5)
        approx = canfield_mckay_log_prob(4, 2)
        assert exact < 0 and approx < 0  # same sign
        assert abs(exact - approx) < abs(exact)  # same order of magnitude


class TestEdgeList:
    def test_round_trip(self):
        g = sample_rrd(12, 4, SwitchChain(), seed=5)
        text = to_edge_list(g)
        header, *edges = text.strip().splitlines()
        assert header == "12 4"
        assert len(edges) == 48
        assert edges == sorted(edges, key=lambda e: tuple(map(int, e.split())))
        g2 = from_edge_list(text)
        assert (g2.adjacency == g.adjacency).all()

    def test_empty_input(self):
        with pytest.raises(ValueError):
            from_edge_list("")


def test_default_burn_in_formula():
    assert default_burn_in(100, 3) == 20 * 100 * 3 * math.ceil(math.log(300))


def test_validate_rejects_bad_matrix():
    g = RegularDigraph(3, 1, np.eye(3, dtype=np.uint8))
    g.validate()
    g.adjacency[0, 0] = 0
    with pytest.raises(ValueError):
        g.validate()
