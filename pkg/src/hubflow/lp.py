"""Dense bounded-variable revised simplex.

Each row gets a logical variable (slack for <=, surplus for >=, a slack
fixed to zero for =). Rows whose logical cannot start feasible get an
artificial; phase 1 drives artificials to zero, after which they are
fixed at zero and phase 2 continues from the same basis. The explicit basis
inverse is updated by rank-one pivots and refactorised periodically.
Dantzig pricing with a two-pass ratio test. A run of degenerate pivots
triggers a small random shift of the basic values away from their bounds
(a right-hand-side perturbation); the shift is removed once the perturbed
problem is optimal, and the solve restarts cold in the rare case that the
final basis is then slightly infeasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ValidationError

TOL_PRIMAL = 1e-9
TOL_DUAL = 1e-9
TOL_PIVOT = 1e-7
REFACTOR_EVERY = 64
STALL_LIMIT = 40
PERTURB = 1e-6

_SENSES = {"<=": "<=", "<": "<=", "L": "<=", "=": "=", "==": "=", "E": "=", ">=": ">=", ">": ">=", "G": ">="}


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimize c.x  s.t.  a x (sense) b,  0 <= x <= upper."""

    c: np.ndarray
    a: np.ndarray
    b: np.ndarray
    senses: tuple[str, ...]
    upper: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        a = np.asarray(self.a, dtype=float).reshape(-1, len(c))
        b = np.asarray(self.b, dtype=float)
        if a.shape[0] != len(b) or len(self.senses) != len(b):
            raise ValidationError("row count mismatch between a, b and senses")
        try:
            senses = tuple(_SENSES[s] for s in self.senses)
        except KeyError as exc:
            raise ValidationError(f"unknown row sense {exc.args[0]!r}") from None
        u = np.full(len(c), np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        if u.shape != c.shape or np.any(u < 0):
            raise ValidationError("upper bounds must be non-negative and one per column")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValidationError("LP coefficients must be finite")
        for k, v in (("c", c), ("a", a), ("b", b), ("senses", senses), ("upper", u)):
            object.__setattr__(self, k, v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


@dataclass
class LpSolution:
    status: Status
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    objective: float | None = None
    dual_objective: float | None = None
    reduced_costs: np.ndarray | None = None
    basis: tuple | None = field(default=None, repr=False)
    iterations: int = 0


class _SingularBasis(Exception):
    pass


class _Restart(Exception):
    pass


_LOST_FEASIBILITY = "lost-feasibility"


class _Simplex:
    def __init__(self, lp: LinearProgram, seed: int = 0):
        m, n = lp.shape
        self.m, self.n = m, n
        sign = np.array([{"<=": 1.0, ">=": -1.0, "=": 1.0}[s] for s in lp.senses])
        logical_u = np.array([0.0 if s == "=" else np.inf for s in lp.senses])
        # columns: structurals | logicals | artificials
        self.A = np.hstack([lp.a, np.diag(sign), np.eye(m)])
        self.u = np.concatenate([lp.upper, logical_u, np.zeros(m)])
        self.c2 = np.concatenate([lp.c, np.zeros(2 * m)])
        self.b = lp.b
        self.sign = sign
        self.at_upper = np.zeros(n + 2 * m, dtype=bool)
        self.is_basic = np.zeros(n + 2 * m, dtype=bool)
        self.iterations = 0
        self.tol_d = TOL_DUAL
        self.b0 = self.b
        self.perturbed = False
        self.rng = np.random.default_rng(seed)

    # basis bookkeeping -------------------------------------------------

    def _set_basis(self, basic):
        self.basic = np.asarray(basic, dtype=np.int64)
        self.is_basic[:] = False
        self.is_basic[self.basic] = True
        self.refactor()

    def refactor(self):
        try:
            self.Binv = np.linalg.inv(self.A[:, self.basic])
        except np.linalg.LinAlgError:
            raise _SingularBasis from None
        rhs = self.b - self.A[:, self.at_upper] @ self.u[self.at_upper]
        self.xB = self.Binv @ rhs
        self.since_refactor = 0

    def cold_start(self):
        m, n = self.m, self.n
        val = self.b / self.sign
        logical_u = self.u[n : n + m]
        ok = (val >= -TOL_PRIMAL) & (val <= logical_u + TOL_PRIMAL)
        basic = np.where(ok, n + np.arange(m), n + m + np.arange(m))
        art_sign = np.where(self.b >= 0, 1.0, -1.0)
        self.A[np.arange(m), n + m + np.arange(m)] = art_sign
        self.u[n + m :] = np.where(ok, 0.0, np.inf)
        self.at_upper[:] = False
        self._set_basis(basic)
        return not ok.all()

    def warm_start(self, basis) -> bool:
        basic_codes, upper_codes = basis
        idx = [self._decode(k) for k in basic_codes]
        ups = [self._decode(k) for k in upper_codes]
        if len(idx) != self.m or len(set(idx)) != self.m or None in idx or None in ups:
            return False
        self.at_upper[:] = False
        for j in ups:
            if np.isfinite(self.u[j]):
                self.at_upper[j] = True
        try:
            self._set_basis(idx)
        except _SingularBasis:
            return False
        if not np.all(np.isfinite(self.Binv)):
            return False
        uB = self.u[self.basic]
        tol = TOL_PRIMAL * 1e3 * (1 + np.abs(self.xB))
        return bool(np.all(self.xB >= -tol) and np.all(self.xB <= uB + tol))

    def _decode(self, code):
        if code >= 0:
            return code if code < self.n else None
        i = -code - 1
        return self.n + i if i < self.m else None

    def _encode(self, j):
        return int(j) if j < self.n else -(int(j) - self.n + 1)

    # iteration -----------------------------------------------------------

    def run(self, cost, max_iter) -> Status:
        # reduced costs carry rounding noise proportional to the cost scale
        self.tol_d = TOL_DUAL * max(1.0, float(np.abs(cost).max(initial=0.0)))
        stall = 0
        while True:
            if self.iterations >= max_iter:
                return Status.ITERATION_LIMIT
            y = cost[self.basic] @ self.Binv
            d = cost - y @ self.A
            room = self.u > 0
            can_up = ~self.is_basic & ~self.at_upper & room & (d < -self.tol_d)
            can_down = ~self.is_basic & self.at_upper & (d > self.tol_d)
            cand = np.flatnonzero(can_up | can_down)
            if len(cand) == 0:
                return self.unperturb()
            q = cand[np.argmax(np.abs(d[cand]))]
            direction = 1.0 if can_up[q] else -1.0
            w = self.Binv @ self.A[:, q]
            delta = direction * w

            theta = np.inf
            leave = -1
            to_upper = False
            uB = self.u[self.basic]
            dec = delta > TOL_PIVOT
            inc = (delta < -TOL_PIVOT) & np.isfinite(uB)
            if dec.any() or inc.any():
                # two-pass (Harris) ratio test: among rows blocking within a
                # small bound tolerance, pivot on the largest entry
                gap_dec = np.maximum(self.xB[dec], 0.0)
                gap_inc = np.maximum(uB[inc] - self.xB[inc], 0.0)
                exact = np.full(self.m, np.inf)
                exact[dec] = gap_dec / delta[dec]
                exact[inc] = gap_inc / -delta[inc]
                relaxed = np.full(self.m, np.inf)
                relaxed[dec] = (gap_dec + TOL_PRIMAL) / delta[dec]
                relaxed[inc] = (gap_inc + TOL_PRIMAL) / -delta[inc]
                eligible = np.flatnonzero(exact <= relaxed.min())
                leave = eligible[np.argmax(np.abs(delta[eligible]))]
                theta = exact[leave]
                to_upper = bool(inc[leave])
            if self.u[q] <= theta:
                theta = self.u[q]
                leave = -1
            if not np.isfinite(theta):
                return Status.UNBOUNDED

            self.iterations += 1
            stall = stall + 1 if theta <= TOL_PRIMAL else 0
            if stall > STALL_LIMIT and not self.perturbed:
                self.perturb()
                stall = 0
                continue

            self.xB -= theta * delta
            if leave < 0:  # bound flip, basis unchanged
                self.at_upper[q] = not self.at_upper[q]
                continue
            entering_value = theta if direction > 0 else self.u[q] - theta
            out = self.basic[leave]
            self.is_basic[out] = False
            self.at_upper[out] = to_upper
            self.is_basic[q] = True
            self.at_upper[q] = False
            self.basic[leave] = q
            self.xB[leave] = entering_value
            piv = w[leave]
            row = self.Binv[leave] / piv
            self.Binv -= np.outer(w, row)
            self.Binv[leave] = row
            self.since_refactor += 1
            if self.since_refactor >= REFACTOR_EVERY:
                self.refactor()

    def perturb(self):
        """Move basic values off their bounds by tiny random amounts and
        absorb the shift into the working right-hand side."""
        uB = self.u[self.basic]
        room = uB > 0
        eps = self.rng.uniform(0.5, 1.0, self.m) * PERTURB * (1.0 + np.abs(self.xB))
        eps = np.minimum(eps, 0.5 * uB)  # stays inside finite ranges
        at_top = room & np.isfinite(uB) & (self.xB > uB - eps)
        self.xB = np.where(room, np.clip(self.xB, 0.0, uB), self.xB)
        self.xB = self.xB + np.where(room & ~at_top, eps, 0.0) - np.where(at_top, eps, 0.0)
        self.b = self.A[:, self.basic] @ self.xB + self.A[:, self.at_upper] @ self.u[self.at_upper]
        self.perturbed = True

    def unperturb(self) -> Status:
        if not self.perturbed:
            return Status.OPTIMAL
        self.b = self.b0
        self.perturbed = False
        self.refactor()
        uB = self.u[self.basic]
        tol = TOL_PRIMAL * 1e2 * (1 + np.abs(self.xB))
        if np.all(self.xB >= -tol) and np.all(self.xB <= uB + tol):
            return Status.OPTIMAL
        return _LOST_FEASIBILITY

    def primal(self):
        x = np.where(self.at_upper, self.u, 0.0)
        x[self.basic] = self.xB
        return x


def solve_lp(lp: LinearProgram, basis=None, max_iter: int | None = None) -> LpSolution:
    """Solve ``lp``. ``basis`` may be the ``basis`` of an earlier solution of
    an LP with the same rows (columns may have been appended since).

    A solve whose basis turns numerically singular, or that ends slightly
    infeasible after its perturbation is removed, restarts from the slack
    basis with a fresh perturbation (at most twice).
    """
    for attempt in range(3):
        try:
            return _solve(lp, basis if attempt == 0 else None, max_iter, seed=attempt)
        except (_SingularBasis, _Restart):
            continue
    raise RuntimeError("simplex failed three times on numerical trouble; LP is too ill-conditioned")


def _solve(lp: LinearProgram, basis, max_iter: int | None, seed: int = 0) -> LpSolution:
    m, n = lp.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    s = _Simplex(lp, seed)
    total = 0
    if m == 0:
        if np.any((lp.c < 0) & ~np.isfinite(lp.upper)):
            return LpSolution(Status.UNBOUNDED)
        x = np.where(lp.c < 0, lp.upper, 0.0)
        obj = float(lp.c @ x)
        return LpSolution(Status.OPTIMAL, x, np.zeros(0), obj, obj, lp.c.copy(), ((), ()), 0)

    warm = basis is not None and s.warm_start(basis)
    if not warm:
        s.A[:, n + m :] = np.eye(m)
        needs_phase1 = s.cold_start()
        if needs_phase1:
            c1 = np.zeros(n + 2 * m)
            c1[n + m :] = (s.u[n + m :] > 0).astype(float)
            status = s.run(c1, max_iter)
            total = s.iterations
            if status is Status.ITERATION_LIMIT:
                return LpSolution(status, iterations=total)
            if status == _LOST_FEASIBILITY:
                raise _Restart
            infeas = float(c1 @ s.primal())
            if infeas > 1e-7 * (1 + np.abs(lp.b).max()):
                return LpSolution(Status.INFEASIBLE, iterations=total)
            s.u[n + m :] = 0.0
            s.at_upper[n + m :] = False
            s.refactor()
    status = s.run(s.c2, max_iter)
    total = s.iterations
    if status == _LOST_FEASIBILITY:
        raise _Restart
    if status is not Status.OPTIMAL:
        return LpSolution(status, iterations=total)

    s.refactor()
    xf = s.primal()
    x = np.clip(xf[:n], 0.0, lp.upper)
    y = s.c2[s.basic] @ s.Binv
    d_all = s.c2 - y @ s.A
    d = d_all[:n]
    obj = float(lp.c @ x)
    finite = np.isfinite(s.u)
    dual_obj = float(lp.b @ y + np.sum(np.minimum(d_all[finite], 0.0) * s.u[finite]))
    basis_out = (
        tuple(s._encode(j) for j in s.basic if j < n + m),
        tuple(s._encode(j) for j in np.flatnonzero(s.at_upper) if j < n + m),
    )
    if len(basis_out[0]) != m:
        basis_out = None  # an artificial stayed basic; not reusable
    return LpSolution(Status.OPTIMAL, x, y, obj, dual_obj, d, basis_out, total)
