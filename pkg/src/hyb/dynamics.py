"""Term evaluation and closed-form solving of the linear ODE systems.

Environments are plain dicts mapping every program variable to a float.  A
differential statement compiles to x' = A x + b over a fixed variable order;
its exact solution is evaluated through the matrix exponential of the
augmented (n+1)x(n+1) matrix [[A, b], [0, 0]], which handles singular A
uniformly.  scipy's expm (scaling-and-squaring, Pade-13 core) is the solver;
a Runge-Kutta integrator exists only on the test side as an independent
oracle, never here.

Boolean atoms compare doubles exactly by default.  A guard tolerance delta
may be supplied to round |lhs - rhs| <= delta to equality for users who hit
float-precision trouble at guard boundaries.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .syntax import And, BoolLit, Cmp, Const, Not, Scaled


class NegativeTime(ValueError):
    pass


def eval_lterm(t, env):
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Scaled):
        return t.coeff * env[t.var]
    return eval_lterm(t.left, env) + eval_lterm(t.right, env)


def eval_bexpr(b, env, tol=0.0):
    if isinstance(b, BoolLit):
        return b.value
    if isinstance(b, Cmp):
        lhs = eval_lterm(b.left, env)
        rhs = eval_lterm(b.right, env)
        if b.op == "<=":
            return lhs <= rhs or abs(lhs - rhs) <= tol
        return lhs >= rhs or abs(lhs - rhs) <= tol
    if isinstance(b, Not):
        return not eval_bexpr(b.expr, env, tol)
    if isinstance(b, And):
        return eval_bexpr(b.left, env, tol) and eval_bexpr(b.right, env, tol)
    return eval_bexpr(b.left, env, tol) or eval_bexpr(b.right, env, tol)


def update_env(env, updates):
    """sigma with the given variables rebound; everything else untouched."""
    out = dict(env)
    out.update(updates)
    return out


def _linear_parts(t, coeffs):
    """Accumulate t's variable coefficients into `coeffs`, return its constant."""
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Scaled):
        coeffs[t.var] = coeffs.get(t.var, 0.0) + t.coeff
        return 0.0
    return _linear_parts(t.left, coeffs) + _linear_parts(t.right, coeffs)


class LinSys:
    """x' = A x + b over a fixed variable order."""

    def __init__(self, a, b, order):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.order = tuple(order)
        self.is_constant = not (self.a.any() or self.b.any())
        self._aug = None

    def augmented(self):
        if self._aug is None:
            n = len(self.order)
            m = np.zeros((n + 1, n + 1))
            m[:n, :n] = self.a
            m[:n, n] = self.b
            self._aug = m
        return self._aug

    def __repr__(self):
        return f"LinSys(order={self.order}, a={self.a.tolist()}, b={self.b.tolist()})"


def compile_system(eqs, order):
    """A[i][j] = coefficient of x_j in the i-th right-hand side; b[i] its
    constant part.  `eqs` must cover `order` (well_formed guarantees it)."""
    index = {x: i for i, x in enumerate(order)}
    n = len(order)
    a = np.zeros((n, n))
    b = np.zeros(n)
    for x, t in eqs:
        coeffs = {}
        const = _linear_parts(t, coeffs)
        i = index[x]
        b[i] = const
        for var, c in coeffs.items():
            a[i][index[var]] = c
    return LinSys(a, b, order)


class FlowFn:
    """phi_sigma: [0, inf) -> R^n, the exact solution from initial env sigma.

    Immutable and shareable; FlowFn(0) gives back sigma restricted to the
    system's variable order.
    """

    def __init__(self, linsys, env):
        self.linsys = linsys
        self.env = env
        self.x0 = np.array([env[x] for x in linsys.order])

    def at(self, t):
        return flow_at(self, t)

    def __repr__(self):
        return f"FlowFn({self.linsys!r}, x0={self.x0.tolist()})"


def flow_at(flow, t):
    """Exact state at time t >= 0, as an env over the system's order."""
    if t < 0:
        raise NegativeTime(f"flow time must be >= 0, got {t}")
    sys = flow.linsys
    if sys.is_constant or t == 0.0 or not sys.order:
        return {x: flow.env[x] for x in sys.order}
    n = len(sys.order)
    z = np.empty(n + 1)
    z[:n] = flow.x0
    z[n] = 1.0
    out = expm(sys.augmented() * t) @ z
    return dict(zip(sys.order, out[:n].tolist()))
