import math

import pytest
from hypothesis import given, strategies as st

from laminar_secretary import (
    GenSpec,
    allkicked_bound,
    best_p,
    g_exact,
    g_refined_bound,
    g_weak_bound,
    generate,
    geometric_sum,
    greedy_opt,
    ratio_lower_bound,
    rel_ent,
    theory_params,
    weighted_penalty,
    weighted_penalty_telescoped,
)

from helpers import four_element, mixed_instances, rank1, tree

# frozen evaluations of the closed forms at the headline operating point
ALPHA_008 = 0.2792900625062013
C_008 = 0.2944
C_GEO_008 = 0.41723356009070295
BOUND_D0_008 = 0.11652918707741733
BOUND_D1_008 = 0.03430619267559166
RATIO_008 = 0.05357614805500742

approx = pytest.approx


class TestParams:
    def test_headline_point(self):
        t = theory_params(0.08)
        assert t.alpha == approx(ALPHA_008, rel=1e-12)
        assert t.c == approx(C_008, rel=1e-12)
        assert t.c_geo == approx(C_GEO_008, rel=1e-12)

    @pytest.mark.parametrize("p", [0.0, 0.5, 0.6, -0.1])
    def test_domain(self, p):
        with pytest.raises(ValueError, match="must be in"):
            theory_params(p)

    def test_alpha_small_p_limit(self):
        assert theory_params(1e-5).alpha == approx(0.25, abs=1e-4)

    @given(st.floats(0.001, 0.499))
    def test_alpha_alternate_algebraic_form(self, p):
        t = theory_params(p)
        other = -(p - (p - 1.0) * math.log1p(-p)) / (2.0 * (p - 1.0) * p * p)
        assert t.alpha == approx(other, rel=1e-11)

    @given(st.floats(0.001, 0.499))
    def test_ranges(self, p):
        t = theory_params(p)
        assert t.alpha > 0
        assert 0 < t.c < 1
        assert t.c_geo == approx(t.c / (1 - t.c), rel=1e-12)


class TestAllKickedBound:
    def test_values(self):
        t = theory_params(0.08)
        assert allkicked_bound(t, 0) == approx(BOUND_D0_008, rel=1e-12)
        assert allkicked_bound(t, 1) == approx(BOUND_D1_008, rel=1e-12)
        assert allkicked_bound(t, 1) == approx(allkicked_bound(t, 0) * t.c, rel=1e-12)

    def test_decreasing_and_vanishing(self):
        t = theory_params(0.08)
        values = [allkicked_bound(t, d) for d in range(50)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-20

    def test_negative_rank_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            allkicked_bound(theory_params(0.08), -1)

    def test_matches_geometric_tail(self):
        # the bound is the closed form of sum_{l > d} alpha c^l
        t = theory_params(0.11)
        for d in range(5):
            tail = sum(t.alpha * t.c ** l for l in range(d + 1, 400))
            assert allkicked_bound(t, d) == approx(tail, rel=1e-12)


class TestRelEnt:
    def test_zero_iff_equal(self):
        for q in (0.1, 0.5, 0.9):
            assert rel_ent(q, q) == approx(0.0, abs=1e-15)

    def test_values(self):
        assert rel_ent(0.5, 0.25) == approx(0.14384103622589042, rel=1e-12)
        assert rel_ent(1.0, 0.5) == approx(math.log(2.0), rel=1e-12)

    def test_edge_conventions(self):
        assert rel_ent(0.0, 0.5) == approx(math.log(2.0), rel=1e-12)

    @pytest.mark.parametrize("y", [0.0, 1.0])
    def test_reference_must_be_interior(self, y):
        with pytest.raises(ValueError, match="y must be in"):
            rel_ent(0.5, y)

    @given(st.floats(0.0, 1.0), st.floats(0.01, 0.99))
    def test_non_negative(self, x, y):
        assert rel_ent(x, y) >= -1e-12


class TestGeometricSum:
    @given(st.floats(0.01, 0.95), st.integers(0, 30))
    def test_matches_direct_sum(self, c, i):
        direct = sum(c ** j for j in range(1, i + 1))
        assert geometric_sum(c, i) == approx(direct, rel=1e-10, abs=1e-12)


class TestGExact:
    def test_single_capacity_closed_form(self):
        # one capacity node of rank k: the m heaviest optimum elements sit at
        # padded backward ranks k-1 .. k-m, so g telescopes to c_m * c^(k-m)
        inst = generate(GenSpec("uniform", n=6, seed=2, rank=4))
        c = 0.2944
        for m in range(0, 5):
            expect = geometric_sum(c, m) * c ** (4 - m)
            assert g_exact(inst, m, inst.root_id, c) == approx(expect, rel=1e-12, abs=1e-15)

    def test_empty_prefix(self):
        assert g_exact(four_element(), 0, 0, 0.2944) == 0.0

    def test_four_element_value(self):
        assert g_exact(four_element(), 1, 0, 0.2944) == approx(0.319916048384, rel=1e-12)

    def test_m_out_of_range(self):
        with pytest.raises(ValueError, match="m must be within"):
            g_exact(four_element(), 4, 0, 0.2944)

    def test_padding_matters_for_sparse_nodes(self):
        # a lone element under nested capacities 1 < 2 < 3 contributes
        # c + c^2 + c^3 thanks to the padded ranks -- not 3c
        inst = tree("lone", [(0, 3, None), (1, 2, 0), (2, 1, 1)], {0: 2}, [4.0])
        c = 0.2944
        assert g_exact(inst, 1, 0, c) == approx(c + c ** 2 + c ** 3, rel=1e-12)


class TestGBounds:
    def test_base_cases(self):
        assert g_refined_bound(0, 5, 0.2944) == 0.0
        assert g_refined_bound(1, 1, 0.2944) == approx(0.2944, rel=1e-12)

    def test_parameter_validation(self):
        with pytest.raises(ValueError, match="0 <= m <= k"):
            g_refined_bound(3, 2, 0.2)
        with pytest.raises(ValueError, match="c must be in"):
            g_refined_bound(1, 2, 0.6)
        with pytest.raises(ValueError, match="c must be in"):
            g_weak_bound(1, 0.5)

    @pytest.mark.parametrize("c", [0.05, 0.15, 0.2944, 0.4, 0.49])
    def test_refined_below_weak_on_grid(self, c):
        for k in range(0, 9):
            for m in range(0, k + 1):
                assert g_refined_bound(m, k, c) <= g_weak_bound(m, c) + 1e-12

    def test_exact_below_refined_below_weak(self):
        c = 0.2944
        for inst in mixed_instances(15, seed0=60):
            for nd in inst.nodes:
                opt = greedy_opt(inst, None, nd.id)
                for m in range(len(opt) + 1):
                    g = g_exact(inst, m, nd.id, c)
                    refined = g_refined_bound(m, nd.capacity, c)
                    assert g <= refined + 1e-12
                    assert refined <= g_weak_bound(m, c) + 1e-12


class TestWeightedPenalty:
    def test_single_element(self):
        c = 0.2944
        assert weighted_penalty(rank1([7.5]), c) == approx(7.5 * c, rel=1e-12)

    def test_four_element_value(self):
        c = 0.2944
        assert weighted_penalty(four_element(), c) == approx(4.2213172838399995, rel=1e-12)
        assert weighted_penalty(four_element(), c) <= g_weak_bound(1, c) * 17.0

    def test_vanishes_with_c(self):
        assert weighted_penalty(four_element(), 1e-9) == approx(0.0, abs=1e-7)

    def test_c_domain(self):
        with pytest.raises(ValueError, match="c must be in"):
            weighted_penalty(four_element(), 0.5)

    def test_bounded_on_random_instances(self):
        c = 0.2944
        for inst in mixed_instances(15, seed0=61):
            w_opt = greedy_opt(inst, None, inst.root_id).weight
            assert weighted_penalty(inst, c) <= g_weak_bound(1, c) * w_opt + 1e-12

    def test_telescoped_form_agrees(self):
        for c in (0.1, 0.2944, 0.45):
            for inst in [four_element()] + mixed_instances(8, seed0=62):
                direct = weighted_penalty(inst, c)
                tele = weighted_penalty_telescoped(inst, c)
                assert tele == approx(direct, rel=1e-9, abs=1e-12)


class TestRatioBound:
    def test_headline_value(self):
        assert ratio_lower_bound(0.08) == approx(RATIO_008, rel=1e-12)
        assert ratio_lower_bound(0.08) >= 0.053

    def test_vanishes_with_p(self):
        assert 0 < ratio_lower_bound(1e-6) < 1e-5

    @given(st.floats(0.001, 0.45))
    def test_below_p(self, p):
        assert ratio_lower_bound(p) < p

    def test_fine_grid_maximizer(self):
        p_star, ratio_star = best_p(0.001)
        assert 0.07 <= p_star <= 0.09
        assert ratio_star >= 0.053
        assert p_star == approx(0.083, abs=1e-12)

    def test_coarse_grid_maximizer(self):
        p_star, ratio_star = best_p(0.1)
        assert p_star == approx(0.1, abs=1e-12)
        assert ratio_star == approx(ratio_lower_bound(0.1), rel=1e-12)

    def test_single_point_grid(self):
        p_star, ratio_star = best_p(0.05, p_min=0.25, p_max=0.25)
        assert p_star == 0.25
        assert ratio_star == approx(ratio_lower_bound(0.25), rel=1e-12)

    def test_step_validation(self):
        with pytest.raises(ValueError, match="step"):
            best_p(0.0)
