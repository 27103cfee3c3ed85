import numpy as np
import pytest
from oracles import random_lp, tableau_simplex

from hubflow.errors import ValidationError
from hubflow.lp import LinearProgram, Status, solve_lp


def check_certificate(lp, sol):
    x, y = sol.x, sol.duals
    ax = lp.a @ x
    for s, lhs, rhs, yi in zip(lp.senses, ax, lp.b, y):
        if s == "<=":
            assert lhs <= rhs + 1e-7 and yi <= 1e-7
        elif s == ">=":
            assert lhs >= rhs - 1e-7 and yi >= -1e-7
        else:
            assert abs(lhs - rhs) <= 1e-7
        if s != "=" and abs(lhs - rhs) > 1e-6:
            assert abs(yi) <= 1e-7
    assert np.all(x >= -1e-9) and np.all(x <= lp.upper + 1e-9)
    d = sol.reduced_costs
    assert np.allclose(d, lp.c - y @ lp.a, atol=1e-7)
    inner = (x > 1e-7) & (x < lp.upper - 1e-7)
    assert np.all(np.abs(d[inner]) <= 1e-7)
    assert np.all(d[x > 1e-7] <= 1e-7)
    assert np.all(d[x < lp.upper - 1e-7] >= -1e-7)
    assert sol.objective == pytest.approx(sol.dual_objective, abs=1e-6)


@pytest.mark.parametrize("seed", range(300))
def test_random_against_tableau(seed):
    lp = random_lp(seed)
    status, value = tableau_simplex(lp.c, lp.a, lp.b, lp.senses, lp.upper)
    sol = solve_lp(lp)
    assert sol.status.value.lower() == status
    if status == "optimal":
        assert sol.objective == pytest.approx(value, abs=1e-6)
        check_certificate(lp, sol)


def test_small_known_optimum():
    # max x + y  s.t.  x + 2y <= 4, 3x + y <= 6
    lp = LinearProgram([-1, -1], [[1, 2], [3, 1]], [4, 6], ["<=", "<="])
    sol = solve_lp(lp)
    assert sol.status is Status.OPTIMAL
    assert sol.x == pytest.approx([1.6, 1.2])
    assert sol.objective == pytest.approx(-2.8)


def test_unbounded_and_infeasible():
    assert solve_lp(LinearProgram([-1, 0], [[1, -1]], [1], ["<="])).status is Status.UNBOUNDED
    assert solve_lp(LinearProgram([1], [[1], [1]], [1, 2], ["<=", ">="])).status is Status.INFEASIBLE


def test_upper_bounds_without_rows():
    sol = solve_lp(LinearProgram([-2, 3], np.zeros((0, 2)), [], [], [4, 1]))
    assert sol.status is Status.OPTIMAL and sol.objective == -8
    assert solve_lp(LinearProgram([-1], np.zeros((0, 1)), [], [])).status is Status.UNBOUNDED


def test_degenerate_cycling_example():
    # classic instance on which textbook Dantzig pivoting cycles
    c = [-0.75, 150, -0.02, 6]
    a = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    sol = solve_lp(LinearProgram(c, a, [0, 0, 1], ["<="] * 3))
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(-0.05)


def test_warm_start_after_adding_columns():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 3, size=(4, 6)).astype(float)
    a[:, 0] = 1
    c = rng.integers(1, 9, size=6).astype(float)
    lp = LinearProgram(c, a, np.ones(4), [">="] * 4)
    first = solve_lp(lp)
    extra = np.hstack([a, np.ones((4, 1))])
    bigger = LinearProgram(np.append(c, 0.5), extra, np.ones(4), [">="] * 4)
    cold, warm = solve_lp(bigger), solve_lp(bigger, basis=first.basis)
    assert warm.status is Status.OPTIMAL
    assert warm.objective == pytest.approx(cold.objective) == pytest.approx(0.5)


def test_bad_warm_basis_falls_back():
    lp = LinearProgram([1, 1], [[1, 1]], [1], [">="])
    sol = solve_lp(lp, basis=((7,), ()))
    assert sol.status is Status.OPTIMAL and sol.objective == pytest.approx(1)


def test_iteration_limit():
    lp = LinearProgram([-1, -1], [[1, 2], [3, 1]], [4, 6], ["<=", "<="])
    assert solve_lp(lp).iterations >= 2
    assert solve_lp(lp, max_iter=1).status is Status.ITERATION_LIMIT


@pytest.mark.parametrize(
    "args",
    [
        ([1, 1], [[1, 1]], [1, 2], ["<="]),
        ([1], [[1]], [1], ["~"]),
        ([1], [[1]], [1], ["<="], [-1]),
        ([np.nan], [[1]], [1], ["<="]),
    ],
)
def test_validation(args):
    with pytest.raises(ValidationError):
        LinearProgram(*args)


def test_singular_basis_restarts_cold(monkeypatch):
    from hubflow import lp as lpmod

    real = lpmod._Simplex.refactor
    calls = {"n": 0}

    def flaky(self):
        calls["n"] += 1
        if calls["n"] == 2:
            raise lpmod._SingularBasis
        real(self)

    monkeypatch.setattr(lpmod._Simplex, "refactor", flaky)
    lp = LinearProgram([-1, -1], [[1, 2], [3, 1]], [4, 6], ["<=", "<="])
    sol = solve_lp(lp)
    assert sol.status is Status.OPTIMAL and sol.objective == pytest.approx(-2.8)
    assert calls["n"] > 2


def test_lost_feasibility_restarts_then_gives_up(monkeypatch):
    from hubflow import lp as lpmod

    real = lpmod._Simplex.unperturb
    calls = {"n": 0}

    def lossy(self):
        calls["n"] += 1
        if calls["n"] == 1:
            real(self)
            return lpmod._LOST_FEASIBILITY
        return real(self)

    monkeypatch.setattr(lpmod._Simplex, "unperturb", lossy)
    lp = LinearProgram([-1, -1], [[1, 2], [3, 1]], [4, 6], ["<=", "<="])
    sol = solve_lp(lp)
    assert sol.status is Status.OPTIMAL and sol.objective == pytest.approx(-2.8)
    assert calls["n"] >= 2

    monkeypatch.setattr(lpmod._Simplex, "unperturb", lambda self: lpmod._LOST_FEASIBILITY)
    with pytest.raises(RuntimeError):
        solve_lp(lp)


def test_degenerate_stall_is_broken_by_perturbation(monkeypatch):
    from hubflow import lp as lpmod

    monkeypatch.setattr(lpmod, "STALL_LIMIT", 0)
    for seed in range(60):
        lp = random_lp(seed)
        status, value = tableau_simplex(lp.c, lp.a, lp.b, lp.senses, lp.upper)
        sol = solve_lp(lp)
        assert sol.status.value.lower() == status
        if status == "optimal":
            assert sol.objective == pytest.approx(value, abs=1e-6)
            check_certificate(lp, sol)
