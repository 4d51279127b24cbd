import itertools
import json
import math

import numpy as np
import pytest

from rmpsc.codes import (
    CodeSpec,
    ReliabilityOrder,
    beta_expansion_reliability,
    count_min_weight_codewords,
    dim_rm,
    extend_code,
    load_reliability,
    min_weight_count_via_dual,
    rm_order,
    rm_polar_construct,
    search_max_symmetry,
    search_rm_psc,
    weight_distribution_via_dual,
)
from rmpsc.monomials import (
    GeneratorSet,
    evaluate_monomial,
    index_leq,
    is_decreasing,
    min_distance,
    monomial_from_index,
    upward_closure,
)


def enumerate_codeword_weights(code: CodeSpec):
    rows = code.generator_rows()
    for sel in itertools.product((0, 1), repeat=code.K):
        cw = np.zeros(code.N, dtype=np.uint8)
        for bit, row in zip(sel, rows):
            if bit:
                cw ^= row
        yield int(cw.sum())


class TestCodeSpec:
    def test_known_code_dimensions(self):
        assert CodeSpec.from_i_min({27}, 7).K == 60
        assert CodeSpec.from_i_min({19}, 6).K == 37
        assert CodeSpec.from_i_min({63, 121}, 10).K == 512
        assert CodeSpec.from_i_min({183, 207, 241, 391, 928}, 10).K == 512

    def test_info_set_matches_closure(self):
        code = CodeSpec.from_i_min({27}, 7)
        assert code.info_set == upward_closure({27}, 7)
        assert code.i_min == (27,)

    def test_from_info_set_round_trip(self):
        info = upward_closure({19}, 6)
        code = CodeSpec.from_info_set(info, 6)
        assert code.i_min == (19,)

    def test_from_info_set_rejects_non_closed(self):
        with pytest.raises(ValueError):
            CodeSpec.from_info_set({1, 2}, 3)

    def test_closure_two_ways(self):
        # index-order closure must agree with the monomial-set construction
        code = CodeSpec.from_i_min({11, 21}, 5)
        by_index = {
            i for i in range(32) if any(index_leq(j, i, 5) for j in (11, 21))
        }
        assert code.info_set == by_index
        assert code.gen_set.indices == code.info_set

    def test_json_round_trip(self, tmp_path):
        code = CodeSpec.from_i_min({63, 121}, 10)
        path = tmp_path / "code.json"
        code.save(path)
        loaded = CodeSpec.load(path)
        assert loaded == code
        assert json.loads(code.to_json())["n"] == 10

    def test_min_distance_and_flags(self):
        code = CodeSpec.from_i_min({27}, 7)
        assert code.min_distance == 16
        assert code.is_rm_polar
        assert not code.extreme_dimension
        rate1 = CodeSpec.from_i_min({0}, 3)
        assert rate1.K == 8
        assert rate1.extreme_dimension

    def test_frozen_mask(self):
        code = CodeSpec.from_i_min({3, 5, 6}, 3)
        mask = code.frozen_mask()
        assert mask.tolist() == [1, 1, 1, 0, 1, 0, 0, 0]


class TestReliability:
    def test_beta_expansion_small(self):
        rel = beta_expansion_reliability(2)
        assert rel.order == (0, 1, 2, 3)

    def test_extremes(self):
        for n in (3, 5, 7):
            rel = beta_expansion_reliability(n)
            assert rel.order[0] == 0
            assert rel.order[-1] == (1 << n) - 1

    def test_upo_consistent(self):
        for n in range(2, 9):
            assert beta_expansion_reliability(n).upo_consistent

    def test_invalid_beta(self):
        with pytest.raises(ValueError):
            beta_expansion_reliability(3, beta=1.0)

    def test_inconsistent_order_detected(self):
        # most reliable first is definitely inconsistent
        n = 3
        rel = ReliabilityOrder(n, tuple(reversed(range(8))))
        assert not rel.upo_consistent

    def test_file_round_trip(self, tmp_path):
        rel = beta_expansion_reliability(4)
        path = tmp_path / "rel.txt"
        path.write_text("".join(f"{i}\n" for i in rel.order))
        loaded = load_reliability(path)
        assert loaded.order == rel.order
        assert loaded.upo_consistent

    def test_file_length_validated(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0\n1\n2\n")
        with pytest.raises(ValueError):
            load_reliability(path)


class TestRmPolarConstruct:
    def test_exact_first_order(self):
        code = rm_polar_construct(3, 4)
        assert code.info_set == {3, 5, 6, 7}

    def test_rm_dimensions_give_rm_codes(self):
        for n in (4, 5, 6):
            for r in range(n + 1):
                code = rm_polar_construct(n, dim_rm(r, n))
                expect = {
                    i for i in range(1 << n)
                    if monomial_from_index(i, n).degree <= r
                }
                assert code.info_set == expect

    def test_64_37_distance(self):
        code = rm_polar_construct(6, 37)
        assert code.min_distance == 8
        assert code.K == 37

    def test_outputs_decreasing_and_optimal(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            k = int(rng.integers(1, (1 << n) + 1))
            code = rm_polar_construct(n, k)
            assert code.K == k
            assert is_decreasing(code.gen_set)
            assert code.min_distance == 1 << (n - rm_order(k, n))

    def test_brute_force_distance_small(self):
        for k in range(1, 9):
            code = rm_polar_construct(3, k)
            if code.K <= 8:
                weights = [w for w in enumerate_codeword_weights(code) if w > 0]
                assert min(weights) == code.min_distance

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            rm_polar_construct(3, 9)
        with pytest.raises(ValueError):
            rm_polar_construct(3, 0)

    def test_rejects_inconsistent_reliability(self):
        rel = ReliabilityOrder(3, tuple(reversed(range(8))))
        with pytest.raises(ValueError):
            rm_polar_construct(3, 4, rel)


class TestExtend:
    def test_extend_3_to_rm24(self):
        code = extend_code({3}, 3)
        assert code.N == 16
        assert code.K == 11
        expect = {i for i in range(16) if monomial_from_index(i, 4).degree <= 2}
        assert code.info_set == expect

    def test_generators_gain_top_variable(self):
        base = CodeSpec.from_i_min({19}, 6)
        ext = extend_code({19}, 6)
        for i in base.i_min:
            m_old = monomial_from_index(i, 6)
            m_new = monomial_from_index(i, 7)
            assert m_new.variables == m_old.variables + (6,)

    def test_symmetry_grows_by_one(self):
        assert extend_code({19}, 6).symmetry == CodeSpec.from_i_min({19}, 6).symmetry + 1

    def test_chain_to_1024(self):
        ext = extend_code({63, 121}, 9)
        assert ext.N == 1024
        assert ext.info_set == upward_closure({63, 121}, 10)

    def test_rejects_non_rm_polar(self):
        # closure of a single degree-3 monomial at n=5 has dimension 8 but
        # distance 4; the best dimension-8 code reaches 8
        code = CodeSpec.from_i_min({24}, 5)
        assert not code.is_rm_polar
        with pytest.raises(ValueError):
            extend_code({24}, 5)


class TestSearch:
    def test_rm_dimensions_fully_symmetric(self):
        for r in (1, 2, 3):
            k = dim_rm(r, 5)
            codes = search_rm_psc(5, k)
            assert codes, (r, k)
            assert codes[0].symmetry == 5

    def test_exactly_two_infeasible_at_n5(self):
        lo, hi = dim_rm(1, 5), dim_rm(3, 5)
        infeasible = [k for k in range(lo, hi + 1) if not search_rm_psc(5, k)]
        assert infeasible == [12, 14]

    def test_64_37_contains_19(self):
        codes = search_rm_psc(6, 37)
        assert codes
        assert all(c.symmetry == 2 for c in codes)
        assert any(c.i_min == (19,) for c in codes)

    def test_small_n_only_rm(self):
        # at n=3 every non-extreme dimension coincides with an RM dimension
        for r in (1, 2):
            codes = search_rm_psc(3, dim_rm(r, 3))
            assert codes and codes[0].symmetry == 3

    def test_results_are_rm_polar_decreasing(self):
        for k in (9, 11, 15, 18, 22):
            for code in search_rm_psc(5, k):
                assert code.is_rm_polar
                assert is_decreasing(code.gen_set)
                assert code.K == k

    def test_exhaustive_dominates_random_ideals(self):
        # no randomly sampled decreasing RM-polar code may beat the search
        rng = np.random.default_rng(17)
        for k in (9, 13, 18, 21):
            best_t, _ = search_max_symmetry(5, k)
            r = rm_order(k, 5)
            masks = [m for m in range(32) if m.bit_count() <= r]
            for _ in range(200):
                ideal = set()
                while len(ideal) < k:
                    cands = [
                        m
                        for m in masks
                        if m not in ideal
                        and all(
                            p in ideal
                            for p in masks
                            if p != m and _dominated(p, m)
                        )
                    ]
                    ideal.add(cands[int(rng.integers(len(cands)))])
                g = GeneratorSet(5, frozenset(ideal))
                from rmpsc.monomials import symmetry

                assert symmetry(g, check=False) <= best_t

    def test_heuristic_finds_good_codes(self):
        best_t, codes = search_max_symmetry(5, 15, mode="heuristic", seed=1)
        exhaustive_t, _ = search_max_symmetry(5, 15)
        assert best_t == exhaustive_t
        assert codes[0].symmetry == best_t

    def test_search_space_complete_at_n4(self):
        # independent oracle: filter all 2^16 subsets at n=4 down to the
        # decreasing best-distance sets and compare the per-dimension optimum
        from rmpsc.monomials import symmetry as sym

        best_by_k = {}
        for bits in range(1, 1 << 16):
            masks = frozenset(m for m in range(16) if (bits >> m) & 1)
            g = GeneratorSet(4, masks)
            if not is_decreasing(g):
                continue
            k = len(masks)
            max_deg = max(m.bit_count() for m in masks)
            if max_deg != rm_order(k, 4):
                continue
            t = sym(g, check=False)
            best_by_k[k] = max(best_by_k.get(k, 0), t)
        for k, expect_t in best_by_k.items():
            got_t, codes = search_max_symmetry(4, k)
            assert got_t == expect_t, (k, got_t, expect_t)
            assert all(c.symmetry == expect_t for c in codes)

    def test_exhaustive_rejected_large_n(self):
        with pytest.raises(ValueError):
            search_rm_psc(7, 64, mode="exhaustive")

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            search_rm_psc(5, 10, mode="stochastic")


def _dominated(p, m):
    from rmpsc.monomials import _mask_leq

    return _mask_leq(p, m, 5)


class TestMinWeightCounts:
    def test_r13(self):
        code = CodeSpec.from_i_min({3, 5, 6}, 3)
        assert count_min_weight_codewords(code) == 14

    def test_repetition(self):
        code = CodeSpec.from_i_min({(1 << 4) - 1}, 4)
        assert code.K == 1
        assert count_min_weight_codewords(code) == 1

    def test_closure_11_frozen_value(self):
        code = CodeSpec.from_i_min({11}, 5)
        assert count_min_weight_codewords(code) == 364

    def test_guard(self):
        code = CodeSpec.from_i_min({0}, 5)   # K = 32
        with pytest.raises(ValueError):
            count_min_weight_codewords(code)

    def test_dual_matches_brute_force(self):
        for i_min, n in (({3, 5, 6}, 3), ({11}, 5), ({19, 46}, 6), ({27}, 5)):
            code = CodeSpec.from_i_min(i_min, n)
            if code.K > 20:
                continue
            assert min_weight_count_via_dual(code) == count_min_weight_codewords(code)

    def test_dual_full_distribution_small(self):
        code = CodeSpec.from_i_min({3, 5, 6}, 3)
        dist = weight_distribution_via_dual(code)
        brute = [0] * 9
        for w in enumerate_codeword_weights(code):
            brute[w] += 1
        assert dist == brute

    def test_64_37_frozen_value(self):
        code = CodeSpec.from_i_min({19}, 6)
        assert min_weight_count_via_dual(code) == 3480
