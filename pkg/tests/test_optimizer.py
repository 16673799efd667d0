import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_sleeve
from fiopt.lp import INFEASIBLE, LinearProgram, solve
from fiopt.optimizer import (ConstraintConfig, ConvexLimit, build_constraints, cutting_plane_solve, maximize_er,
                             track_index_minimax, track_index_with_view)
from fiopt.risk import RiskConfig, StdevModel
from oracles import lp_vertex_enumeration

NO_CAPS = ConstraintConfig(sector_caps={}, average_rating=None)


def test_single_aaa_sleeve_rating_row_never_binds():
    cons = build_constraints([make_sleeve()], ConstraintConfig())
    i = cons.labels.index("average_rating")
    assert cons.A[i, 0] == 0.0 and cons.b[i] > 0


def test_average_rating_row_on_linear_scale():
    U = [make_sleeve("aa", rating="AA"), make_sleeve("b", rating="B-")]
    cons = build_constraints(U, ConstraintConfig(sector_caps={}, average_rating="BB+"))
    i = cons.labels.index("average_rating")
    u = np.array([0.5, 0.5])
    # fully invested average (3 + 16) / 2 = 9.5 is no worse than BB+ = 11
    assert (3 * 0.5 + 16 * 0.5) == 9.5
    assert cons.A[i] @ u <= cons.b[i]
    assert cons.A[i] @ np.array([0.0, 1.0]) > cons.b[i]
    # partially invested: cash counts as AAA
    assert cons.A[i] @ np.array([0.0, 0.6]) <= cons.b[i]


def test_sector_caps_and_warf():
    U = [make_sleeve("hy", rating="BB", sectors=("HY",)), make_sleeve("g")]
    cons = build_constraints(U, ConstraintConfig(warf_cap=500))
    i = cons.labels.index("sector:HY")
    assert cons.A[i].tolist() == [1.0, 0.0] and cons.b[i] == 0.6
    assert "sector:EM" not in cons.labels
    w = cons.labels.index("warf")
    assert cons.A[w] @ [0.3, 0.7] <= cons.b[w] and cons.A[w] @ [0.4, 0.6] > cons.b[w]
    with pytest.raises(ValueError):
        ConstraintConfig(sector_caps={"XX": 0.1})
    with pytest.raises(ValueError):
        ConstraintConfig(sector_caps={"HY": 1.5})


def test_extra_rows_and_unknown_names():
    U = [make_sleeve("a"), make_sleeve("b")]
    cons = build_constraints(U, ConstraintConfig(extra_rows=[("capital", {"a": 0.08}, 0.02)]))
    assert cons.A[cons.labels.index("capital")].tolist() == [0.08, 0.0]
    with pytest.raises(ValueError):
        build_constraints(U, ConstraintConfig(extra_rows=[("x", {"zz": 1.0}, 1.0)]))
    assert cons.without("capital").labels == [l for l in cons.labels if l != "capital"]


def test_zero_floors_with_losses_everywhere_gives_cash():
    U = [make_sleeve("a"), make_sleeve("b", T=10)]
    cons = build_constraints(U, NO_CAPS)
    sol = maximize_er([0.02, 0.03], cons, dX=[[-0.05, -0.1], [-0.01, -0.02]], floors=[0.0, 0.0])
    assert np.allclose(sol.x, 0.0)


def test_single_binding_scenario_row():
    cons = build_constraints([make_sleeve()], NO_CAPS)
    sol = maximize_er([0.03], cons, dX=[[-0.1]], floors=[0.05])
    assert sol.x[0] == pytest.approx(0.5, abs=1e-12)
    assert "scenario:0" in sol.binding


def test_two_sleeve_program_matches_vertex_enumeration():
    rng = np.random.default_rng(1)
    U = [make_sleeve("a", limit=0.8), make_sleeve("b", limit=0.7)]
    cons = build_constraints(U, NO_CAPS)
    for _ in range(20):
        er = rng.uniform(0, 0.05, 2)
        dX = rng.uniform(-0.2, 0.05, (3, 2))
        floors = rng.uniform(0, 0.1, 3)
        sol = maximize_er(er, cons, dX, floors)
        A = np.vstack([cons.A, -dX])
        b = np.concatenate([cons.b, floors])
        ref, _ = lp_vertex_enumeration(er, A, b, np.zeros(2), cons.upper)
        assert sol.objective == pytest.approx(ref, abs=1e-10)


def test_infeasible_constraints_report_rows_violated_by_cash():
    cons = build_constraints([make_sleeve()], ConstraintConfig(sector_caps={}, average_rating=None,
                                                               extra_rows=[("min_invest", {"S": -1.0}, -2.0)]))
    sol = maximize_er([0.01], cons)
    assert sol.status == INFEASIBLE
    assert sol.diagnostics == ["min_invest"]


def test_transaction_costs_discourage_trading():
    U = [make_sleeve("a"), make_sleeve("b")]
    cons = build_constraints(U, NO_CAPS)
    er = [0.030, 0.031]
    prev = [1.0, 0.0]
    free = maximize_er(er, cons)
    assert free.x == pytest.approx([0.0, 1.0])
    costly = maximize_er(er, cons, transaction_costs=[0.01, 0.01], previous=prev)
    assert costly.x == pytest.approx([1.0, 0.0])
    cheap = maximize_er(er, cons, transaction_costs=[0.0001, 0.0001], previous=prev)
    assert cheap.x == pytest.approx([0.0, 1.0])
    assert cheap.objective == pytest.approx(0.031 - 0.0002)


def test_index_tracking_with_view():
    U = [make_sleeve("idx"), make_sleeve("b", T=10)]
    cons = build_constraints(U, NO_CAPS)
    dX = np.array([[-0.05, -0.1], [0.02, 0.04], [-0.01, -0.03]])
    dY = dX[:, 0]
    sol = track_index_with_view([0.0, 0.0], cons, dX, dY, np.zeros(3))
    assert sol.optimal
    u = np.array([1.0, 0.0])
    assert np.all(dX @ u - dY >= -1e-12)
    # zero index reduces to the plain problem
    a = track_index_with_view([0.01, 0.02], cons, dX, np.zeros(3), [0.05] * 3)
    b = maximize_er([0.01, 0.02], cons, dX, [0.05] * 3)
    assert a.objective == pytest.approx(b.objective, abs=1e-14)


def test_three_sleeve_tracking_matches_vertex_enumeration():
    rng = np.random.default_rng(5)
    U = [make_sleeve(f"s{i}") for i in range(3)]
    cons = build_constraints(U, NO_CAPS)
    for _ in range(10):
        er = rng.uniform(0, 0.05, 3)
        dX = rng.uniform(-0.15, 0.05, (4, 3))
        dY = rng.uniform(-0.1, 0.02, 4)
        eps = rng.uniform(0, 0.05, 4)
        sol = track_index_with_view(er, cons, dX, dY, eps)
        ref, _ = lp_vertex_enumeration(er, np.vstack([cons.A, -dX]), np.concatenate([cons.b, eps - dY]),
                                       np.zeros(3), cons.upper)
        if ref is None:
            assert sol.status == INFEASIBLE
        else:
            assert sol.objective == pytest.approx(ref, abs=1e-10)


def test_minimax_exact_replication_and_empty_universe():
    dX = np.array([[-0.05, -0.1], [0.02, 0.04], [-0.01, -0.03]])
    eps = np.array([0.01, 0.02, 0.03])
    sol = track_index_minimax(dX, dX[:, 1], eps, [1.0, 1.0])
    # replication alone achieves -min(eps); the optimiser may do better
    assert sol.objective <= -eps.min() + 1e-12
    only = track_index_minimax(dX[:, [1]], dX[:, 1], np.zeros(3), [1.0])
    assert only.objective == pytest.approx(0.0, abs=1e-12)
    assert "tracking-infeasible-at-tolerance" not in sol.diagnostics
    dY = np.array([0.05, -0.02, 0.01])
    empty = track_index_minimax(dX, dY, eps, [0.0, 0.0])
    assert empty.objective == pytest.approx(np.max(dY - eps), abs=1e-12)
    assert "tracking-infeasible-at-tolerance" in empty.diagnostics


def test_minimax_random_instances_match_vertex_enumeration():
    rng = np.random.default_rng(9)
    for _ in range(10):
        dX = rng.uniform(-0.2, 0.1, (5, 4))
        dY = rng.uniform(-0.1, 0.05, 5)
        eps = rng.uniform(0, 0.03, 5)
        up = rng.uniform(0.2, 1.0, 4)
        sol = track_index_minimax(dX, dY, eps, up)
        # u0 is bounded below by max(dY - eps - dX u) >= min over box, so a finite box suffices for the oracle
        c = np.concatenate([[-1.0], np.zeros(4)])
        A = np.hstack([-np.ones((5, 1)), -dX])
        ref, _ = lp_vertex_enumeration(c, A, eps - dY, np.concatenate([[-5.0], np.zeros(4)]),
                                       np.concatenate([[5.0], up]))
        assert sol.objective == pytest.approx(-ref, abs=1e-10)


def two_asset_case():
    U = [make_sleeve("gov", T=10, y=0.03),
         make_sleeve("hy", T=5, y=0.06, s=0.035, rating="BB", z=0.1)]
    er = np.array([0.010, 0.030])
    cons = build_constraints(U, NO_CAPS)
    return U, er, cons


def test_cutting_plane_matches_grid_oracle():
    U, er, cons = two_asset_case()
    model = StdevModel(U, RiskConfig())
    limit = 0.05
    prog = LinearProgram(er, cons.A, cons.b, np.zeros(2), cons.upper)
    sol, state = cutting_plane_solve(prog, [ConvexLimit(model, model.gradient, limit, "stdev")])
    assert state.converged and state.iterations <= 50
    assert model(sol.x) <= limit * (1 + 1e-3)

    def best_on(g1, g2):
        u1, u2 = np.meshgrid(g1, g2, indexing="ij")
        U2 = np.stack([u1.ravel(), u2.ravel()], axis=1)
        var = np.array([model.variance(u) for u in U2]) if U2.shape[0] < 0 else None
        a = U2 @ model.d_ir
        b = U2 @ model.w
        c = model.cfg
        var = c.horizon * (c.sigma_y**2 * a * a + c.sigma_c**2 * (c.rho * b * b + (1 - c.rho) * ((U2 * model.w) ** 2).sum(1)))
        ok = (np.sqrt(var) <= limit) & (U2.sum(1) <= 1 + 1e-12)
        vals = np.where(ok, U2 @ er, -np.inf)
        k = int(np.argmax(vals))
        return vals[k], U2[k]

    coarse_val, coarse_u = best_on(np.arange(0, 1.0001, 0.01), np.arange(0, 1.0001, 0.01))
    fine = [np.clip(np.arange(x - 0.02, x + 0.02 + 1e-9, 1e-4), 0, 1) for x in coarse_u]
    oracle, _ = best_on(*fine)
    assert abs(sol.objective - oracle) < 1e-3
    assert sol.objective >= coarse_val - 1e-12


def test_cutting_plane_without_limits_is_the_plain_lp():
    U, er, cons = two_asset_case()
    prog = LinearProgram(er, cons.A, cons.b, np.zeros(2), cons.upper)
    sol, state = cutting_plane_solve(prog, [])
    assert state.iterations == 1 and not state.cuts
    assert sol.objective == pytest.approx(solve(prog).objective)


def test_slack_limit_adds_no_cuts():
    U, er, cons = two_asset_case()
    model = StdevModel(U)
    prog = LinearProgram(er, cons.A, cons.b, np.zeros(2), cons.upper)
    sol, state = cutting_plane_solve(prog, [ConvexLimit(model, model.gradient, 10.0)])
    assert state.cuts == [] and state.converged


def test_non_convergence_is_reported():
    U, er, cons = two_asset_case()
    model = StdevModel(U)
    prog = LinearProgram(er, cons.A, cons.b, np.zeros(2), cons.upper)
    sol, state = cutting_plane_solve(prog, [ConvexLimit(model, model.gradient, 0.05)], eps_cut=0.0, max_iter=0)
    assert not state.converged
    assert state.gap > 0
    assert "not converged" in sol.diagnostics[-1]


@settings(max_examples=40, deadline=None)
@given(st.floats(0.005, 0.08), st.floats(0.001, 0.05), st.floats(0.001, 0.05))
def test_cutting_plane_invariants(limit, e1, e2):
    U, _, cons = two_asset_case()
    er = np.array([e1, e2])
    model = StdevModel(U)
    prog = LinearProgram(er, cons.A, cons.b, np.zeros(2), cons.upper)
    sol, state = cutting_plane_solve(prog, [ConvexLimit(model, model.gradient, limit)])
    assert state.converged
    assert np.all(sol.x >= 0)
    assert model(sol.x) <= limit
    assert np.all(np.diff(state.objectives) <= 1e-12)
    assert np.all(cons.A @ sol.x <= cons.b + 1e-9)
