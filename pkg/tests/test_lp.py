"""LP engine: solver contract, configuration family, exact heights."""

import math

import numpy as np
import pytest

from mheight import (
    CapacityError,
    Configuration,
    GeneratorMatrix,
    InvalidParameterError,
    LPProblem,
    MHeightStats,
    closed_profile,
    configuration_lp,
    dual_dodecahedral,
    dual_icosahedral,
    dual_polygonal,
    exact_mheight,
    exact_profile,
    from_columns,
    iter_configurations,
    lp_family_size,
    solve_lp,
)
from mheight.codes import Family
from mheight.lp import FEAS_TOL, OPTIMAL, UNBOUNDED, INFEASIBLE

SQRT5 = math.sqrt(5.0)


def lp(objective, eq=(), ge=()):
    return LPProblem(tuple(objective),
                     tuple((tuple(a), r) for a, r in eq),
                     tuple((tuple(a), r) for a, r in ge))


class TestSolveLp:
    def test_bounded_segment(self):
        res = solve_lp(lp([1.0], ge=[([-1.0], -1.0)]))
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.point == pytest.approx((1.0,))

    def test_half_line_unbounded(self):
        res = solve_lp(lp([1.0], ge=[([1.0], 0.0)]))
        assert res.status == UNBOUNDED
        assert res.ray == pytest.approx((1.0,))

    def test_box_corner(self):
        res = solve_lp(lp([1.0, 1.0], ge=[
            ([-1.0, 0.0], -1.0), ([0.0, -1.0], -1.0),
            ([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0)]))
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(2.0, abs=1e-12)
        assert res.point == pytest.approx((1.0, 1.0))

    def test_zero_equality_row_is_infeasible(self):
        res = solve_lp(lp([1.0, 0.0], eq=[([0.0, 0.0], 1.0)]))
        assert res.status == INFEASIBLE

    def test_contradictory_rows_infeasible(self):
        res = solve_lp(lp([1.0], ge=[([1.0], 1.0), ([-1.0], 0.0)]))
        assert res.status == INFEASIBLE

    def test_free_direction_makes_unbounded(self):
        # Constraint only pins the first coordinate; objective uses the second.
        res = solve_lp(lp([0.0, 1.0], eq=[([1.0, 0.0], 1.0)]))
        assert res.status == UNBOUNDED
        assert abs(res.ray[1]) > 0.9

    def test_lineality_with_bounded_objective(self):
        # Feasible set is a full line; the objective is constant along it.
        res = solve_lp(lp([1.0, 0.0], eq=[([1.0, 0.0], 2.0)]))
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(2.0, abs=1e-12)

    def test_dim_capacity(self):
        with pytest.raises(CapacityError):
            solve_lp(lp([1.0] * 9))

    def test_row_capacity(self):
        rows = [([1.0], float(i)) for i in range(10_001)]
        with pytest.raises(CapacityError):
            solve_lp(lp([1.0], ge=rows))

    def test_deterministic(self):
        problem = lp([1.0, 2.0], ge=[
            ([-1.0, -1.0], -3.0), ([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0)])
        assert solve_lp(problem) == solve_lp(problem)

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidParameterError):
            lp([math.inf, 1.0])


class TestSolveLpRandomized:
    """Status and value agreement with an independent solver, plus the
    feasibility invariants of reported points and rays."""

    def _random_problems(self, count):
        rng = np.random.default_rng(20240817)
        for _ in range(count):
            dim = int(rng.integers(1, 4))
            n_eq = int(rng.integers(0, 2))
            n_ge = int(rng.integers(1, 7))
            yield lp(rng.normal(size=dim),
                     eq=[(rng.normal(size=dim), float(rng.normal())) for _ in range(n_eq)],
                     ge=[(rng.normal(size=dim), float(rng.normal())) for _ in range(n_ge)])

    def test_against_scipy(self):
        linprog = pytest.importorskip("scipy.optimize").linprog
        for problem in self._random_problems(250):
            ours = solve_lp(problem)
            obj = np.array(problem.objective)
            ge = problem.ineq_constraints
            eq = problem.eq_constraints
            ref = linprog(
                -obj,
                A_ub=-np.array([a for a, _ in ge]) if ge else None,
                b_ub=-np.array([r for _, r in ge]) if ge else None,
                A_eq=np.array([a for a, _ in eq]) if eq else None,
                b_eq=np.array([r for _, r in eq]) if eq else None,
                bounds=[(None, None)] * problem.dim, method="highs")
            status = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}[ref.status]
            assert ours.status == status
            if status == OPTIMAL:
                assert ours.value == pytest.approx(-ref.fun, abs=1e-7, rel=1e-7)

    def test_result_invariants(self):
        for problem in self._random_problems(250):
            res = solve_lp(problem)
            rows = [(np.array(a), r, True) for a, r in problem.eq_constraints]
            rows += [(np.array(a), r, False) for a, r in problem.ineq_constraints]
            if res.status == OPTIMAL:
                z = np.array(res.point)
                for a, r, is_eq in rows:
                    nrm = np.linalg.norm(a)
                    gap = (a @ z - r) / nrm
                    assert abs(gap) <= 2 * FEAS_TOL if is_eq else gap >= -2 * FEAS_TOL
            elif res.status == UNBOUNDED:
                d = np.array(res.ray)
                assert np.array(problem.objective) @ d > 0
                for a, r, is_eq in rows:
                    nrm = np.linalg.norm(a)
                    recess = (a @ d) / nrm
                    assert abs(recess) <= 2 * FEAS_TOL if is_eq else recess >= -2 * FEAS_TOL


class TestConfigurationFamily:
    def test_family_size_formula(self):
        assert lp_family_size(5, 2) == math.comb(5, 2) * 2 * 4
        assert lp_family_size(10, 7) == math.comb(10, 7) * 7 * 128

    @pytest.mark.parametrize("n,m", [(4, 1), (4, 2), (5, 3)])
    def test_iteration_matches_size(self, n, m):
        configs = list(iter_configurations(n, m))
        assert len(configs) == lp_family_size(n, m) * (n - m)
        assert len(set(configs)) == len(configs)

    def test_configuration_validation(self):
        with pytest.raises(InvalidParameterError):
            Configuration((0, 1), 2, 3, (1.0, 1.0))      # max outside top
        with pytest.raises(InvalidParameterError):
            Configuration((0, 1), 0, 1, (1.0, 1.0))      # next inside top
        with pytest.raises(InvalidParameterError):
            Configuration((0, 1), 0, 2, (1.0,))          # signs wrong length
        with pytest.raises(InvalidParameterError):
            Configuration((0, 1), 0, 2, (1.0, 0.5))      # signs not +-1

    def test_configuration_lp_shape(self):
        g = dual_polygonal(5)
        config = Configuration((1, 3), 1, 0, (1.0, -1.0))
        problem = configuration_lp(g, config)
        assert problem.dim == 2
        assert len(problem.eq_constraints) == 1
        # two top rows plus box rows for the 5 - 2 - 1 remaining coordinates
        assert len(problem.ineq_constraints) == 2 + 2 * 2
        assert problem.eq_constraints[0][1] == 1.0


class TestExactMHeight:
    def test_icosahedral_m1(self):
        h = exact_mheight(dual_icosahedral(), 1)
        assert h.value == pytest.approx(SQRT5, rel=1e-6)

    def test_dodecahedral_m7(self):
        h = exact_mheight(dual_dodecahedral(), 7)
        assert h.value == pytest.approx(5.0 + 2.0 * SQRT5, rel=1e-6)

    def test_polygonal_top_m_infinite(self):
        assert exact_mheight(dual_polygonal(4), 3).infinite

    def test_m_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            exact_mheight(dual_polygonal(4), 4)
        with pytest.raises(InvalidParameterError):
            exact_mheight(dual_polygonal(4), 0)

    def test_witness_reproduces_value(self):
        from mheight import encode
        g = dual_dodecahedral()
        for m in (1, 3, 5, 7):
            h = exact_mheight(g, m)
            ratio = encode(g, h.witness).height(m)
            assert ratio == pytest.approx(h.value, rel=1e-9)

    def test_infinite_witness_zeroes_denominator(self):
        from mheight import encode
        g = dual_dodecahedral()
        h = exact_mheight(g, 8)
        assert h.infinite
        c = encode(g, h.witness)
        assert c.order_stats[8] == pytest.approx(0.0, abs=1e-9)
        assert c.order_stats[0] > 0.1

    def test_lp_count_matches_family_size(self):
        for g, m in ((dual_polygonal(5), 2), (dual_polygonal(6), 3),
                     (dual_icosahedral(), 2)):
            stats = MHeightStats()
            exact_mheight(g, m, stats=stats)
            assert stats.lp_count == lp_family_size(g.n, m)

    def test_reference_engine_counts_identically(self):
        stats = MHeightStats()
        exact_mheight(dual_polygonal(5), 2, engine="reference", stats=stats)
        assert stats.lp_count == lp_family_size(5, 2)

    @pytest.mark.parametrize("n,m", [(3, 1), (4, 1), (4, 2), (5, 2), (5, 3)])
    def test_engines_agree_polygonal(self, n, m):
        g = dual_polygonal(n)
        a = exact_mheight(g, m, engine="shared")
        b = exact_mheight(g, m, engine="reference")
        assert a.infinite == b.infinite
        if not a.infinite:
            assert a.value == pytest.approx(b.value, rel=1e-9)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_engines_agree_icosahedral(self, m):
        g = dual_icosahedral()
        a = exact_mheight(g, m, engine="shared")
        b = exact_mheight(g, m, engine="reference")
        assert a.value == pytest.approx(b.value, rel=1e-9)

    def test_engines_agree_dodecahedral_m1(self):
        g = dual_dodecahedral()
        a = exact_mheight(g, 1, engine="shared")
        b = exact_mheight(g, 1, engine="reference")
        assert a.value == pytest.approx(b.value, rel=1e-9)

    def test_unknown_engine(self):
        with pytest.raises(InvalidParameterError):
            exact_mheight(dual_polygonal(3), 1, engine="bogus")

    def test_dimension_capacity_guard(self):
        g = from_columns([tuple(float(i == j) for i in range(9)) for j in range(9)]
                         + [tuple(1.0 for _ in range(9))])
        with pytest.raises(CapacityError):
            exact_mheight(g, 1)

    def test_subset_capacity_guard(self):
        g = dual_polygonal(60)
        with pytest.raises(CapacityError):
            exact_mheight(g, 30)
        with pytest.raises(CapacityError):
            exact_mheight(g, 30, engine="reference")


class TestExactProfile:
    def test_polygonal_3(self):
        prof = exact_profile(dual_polygonal(3))
        assert prof.height(1).value == pytest.approx(2.0, rel=1e-9)
        assert prof.height(2).infinite

    def test_icosahedral_matches_expected(self):
        prof = exact_profile(dual_icosahedral())
        expected = [SQRT5, SQRT5, 2.0 + SQRT5]
        for m, val in enumerate(expected, start=1):
            assert prof.height(m).value == pytest.approx(val, rel=1e-6)
        assert prof.height(4).infinite and prof.height(5).infinite

    def test_identity_generator(self):
        prof = exact_profile(from_columns([(1.0, 0.0), (0.0, 1.0)]))
        assert prof.max_m == 1 and prof.height(1).infinite

    def test_rank_deficient_generator_uses_reference_path(self):
        stats = MHeightStats()
        prof = exact_profile(from_columns([(1.0, 0.0), (1.0, 0.0)]), stats=stats)
        assert stats.engine == "reference"
        assert prof.height(1).value == pytest.approx(1.0, abs=1e-9)

    def test_closed_form_oracle_agreement(self):
        for family in (Family("dual-polygonal", 8), Family("dual-icosahedral")):
            g = (dual_polygonal(8) if family.n else dual_icosahedral())
            closed = closed_profile(family)
            exact = exact_profile(g)
            for m in range(1, g.n):
                c, e = closed.height(m), exact.height(m)
                assert c.infinite == e.infinite
                if not c.infinite:
                    assert e.value == pytest.approx(c.value, rel=1e-6)


class TestInvarianceProperties:
    def _transformed(self, g, rng):
        perm = rng.permutation(g.n)
        signs = rng.choice([-1.0, 1.0], size=g.n)
        return GeneratorMatrix(g.matrix[:, perm] * signs, Family("custom"))

    @pytest.mark.parametrize("builder", [lambda: dual_polygonal(6), dual_icosahedral])
    def test_permutation_and_sign_invariance(self, builder):
        g = builder()
        base = exact_profile(g)
        rng = np.random.default_rng(7)
        for _ in range(5):
            other = exact_profile(self._transformed(g, rng))
            for m in range(1, g.n):
                hb, ho = base.height(m), other.height(m)
                assert hb.infinite == ho.infinite
                if not hb.infinite:
                    assert ho.value == pytest.approx(hb.value, rel=1e-9)

    def test_global_column_scaling_invariance(self):
        g = dual_icosahedral()
        scaled = GeneratorMatrix(3.7 * g.matrix, Family("custom"))
        a, b = exact_profile(g), exact_profile(scaled)
        for m in range(1, g.n):
            assert a.height(m).infinite == b.height(m).infinite
            if not a.height(m).infinite:
                assert b.height(m).value == pytest.approx(a.height(m).value, rel=1e-9)

    def test_sampled_ratios_never_exceed_exact(self):
        rng = np.random.default_rng(11)
        for g in (dual_polygonal(7), dual_icosahedral()):
            prof = exact_profile(g)
            dirs = rng.normal(size=(100_000, g.k))
            mags = np.abs(dirs @ g.matrix)
            mags.sort(axis=1)
            for m in range(1, g.n):
                h = prof.height(m)
                if h.infinite:
                    continue
                den = mags[:, -1 - m]
                ok = den > 0
                assert float(np.max(mags[ok, -1] / den[ok])) <= h.value + 1e-9

    def test_engines_agree_on_random_matrices(self):
        rng = np.random.default_rng(123)
        for _ in range(12):
            k = int(rng.integers(2, 4))
            n = int(rng.integers(k, 7))
            mat = rng.normal(size=(k, n))
            if rng.random() < 0.3:
                # plant a parallel column to force some infinite rows
                j, i = (int(x) for x in rng.integers(0, n, size=2))
                mat[:, j] = mat[:, i] * (2.0 if i != j else 1.0)
            g = GeneratorMatrix(mat, Family("custom"))
            for m in range(1, n):
                a = exact_mheight(g, m, engine="auto")
                b = exact_mheight(g, m, engine="reference")
                assert a.infinite == b.infinite, (mat, m)
                if not a.infinite:
                    assert abs(a.value - b.value) <= 1e-7 * max(1.0, b.value), (mat, m)
