"""Manufactured exact solutions of the 1D wave equation on (0, 1) x (0, T).

Right-hand sides are ``f = u_tt - u_xx``, written out by hand. All callables
take broadcastable arrays ``(x, t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import InvalidParameterError

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ExactSolution:
    u: Field
    du_dt: Field
    du_dx: Field
    f: Field
    label: str
    regularity_note: str = ""
    T: float = 10.0
    L: float = 1.0
    # true if f has an integrable singularity at t = T
    singular_at_T: bool = False


def make_u1(T: float = 10.0) -> ExactSolution:
    """``u1 = t^2 sin(10 pi x) sin(t x)``."""
    k = 10 * np.pi

    def u(x, t):
        return t**2 * np.sin(k * x) * np.sin(t * x)

    def du_dt(x, t):
        a, b, c = np.sin(k * x), np.sin(t * x), np.cos(t * x)
        return a * (2 * t * b + t**2 * x * c)

    def du_dx(x, t):
        a, b, c = np.sin(k * x), np.sin(t * x), np.cos(t * x)
        return t**2 * (k * np.cos(k * x) * b + t * a * c)

    def f(x, t):
        a, ak = np.sin(k * x), np.cos(k * x)
        b, c = np.sin(t * x), np.cos(t * x)
        u_tt = a * (2 * b + 4 * t * x * c - (t * x) ** 2 * b)
        u_xx = t**2 * (-(k**2 + t**2) * a * b + 2 * k * t * ak * c)
        return u_tt - u_xx

    return ExactSolution(u, du_dt, du_dx, f, "u1", "smooth", T=T)


def make_u2(T: float = 10.0) -> ExactSolution:
    """``u2 = t^2 (T - t)^(9/5) sqrt(t + x^2 + 1) sin(pi x)``.

    The time derivatives are only defined for t < T; ``f`` behaves like
    ``(T - t)^(-1/5)`` near the final time.
    """
    if not T > 0:
        raise InvalidParameterError("terminal time must be positive")

    def _g(t):
        s = T - t
        return t**2 * s**1.8

    def _dg(t):
        s = T - t
        return 2 * t * s**1.8 - 1.8 * t**2 * s**0.8

    def _ddg(t):
        s = T - t
        return 2 * s**1.8 - 7.2 * t * s**0.8 + 1.44 * t**2 * s ** (-0.2)

    def _guard(t):
        if np.any(np.asarray(t) >= T):
            raise InvalidParameterError("time derivatives of u2 are only defined for t < T")

    def u(x, t):
        s = np.maximum(T - t, 0.0)
        return t**2 * s**1.8 * np.sqrt(t + x**2 + 1) * np.sin(np.pi * x)

    def du_dt(x, t):
        r = np.sqrt(t + x**2 + 1)
        s = np.maximum(T - t, 0.0)
        g = t**2 * s**1.8
        dg = 2 * t * s**1.8 - 1.8 * t**2 * s**0.8
        return (dg * r + g / (2 * r)) * np.sin(np.pi * x)

    def du_dx(x, t):
        r = np.sqrt(t + x**2 + 1)
        S, dS = np.sin(np.pi * x), np.pi * np.cos(np.pi * x)
        return _g(np.minimum(t, T)) * (x / r * S + r * dS)

    def f(x, t):
        _guard(t)
        r = np.sqrt(t + x**2 + 1)
        S, dS, ddS = np.sin(np.pi * x), np.pi * np.cos(np.pi * x), -np.pi**2 * np.sin(np.pi * x)
        u_tt = (_ddg(t) * r + _dg(t) / r - _g(t) / (4 * r**3)) * S
        r_x, r_xx = x / r, 1 / r - x**2 / r**3
        u_xx = _g(t) * (r_xx * S + 2 * r_x * dS + r * ddS)
        return u_tt - u_xx

    return ExactSolution(
        u, du_dt, du_dx, f, "u2", "H^{23/10 - eps}(Q)", T=T, singular_at_T=True
    )


def make_zero(T: float = 10.0) -> ExactSolution:
    def zero(x, t):
        return np.zeros(np.broadcast(x, t).shape)

    return ExactSolution(zero, zero, zero, zero, "zero", "smooth", T=T)


SOLUTIONS = {"u1": make_u1, "u2": make_u2}


def get_solution(name: str, T: float = 10.0) -> ExactSolution:
    try:
        return SOLUTIONS[name](T)
    except KeyError:
        raise InvalidParameterError(f"unknown solution {name!r}; choose from {sorted(SOLUTIONS)}") from None


@dataclass(frozen=True)
class DerivativeReport:
    samples: int
    max_error: dict[str, float]
    passed: bool


def _richardson(g, z, h):
    d1 = (g(z + h) - g(z - h)) / (2 * h)
    d2 = (g(z + h / 2) - g(z - h / 2)) / h
    return (4 * d2 - d1) / 3


def verify_derivatives(
    sol: ExactSolution,
    samples: int = 1000,
    step: float = 1e-5,
    atol: float = 1e-6,
    rtol: float = 1e-6,
    t_max_fraction: float | None = None,
    seed: int = 0,
) -> DerivativeReport:
    """Compare the closed-form derivatives with Richardson-extrapolated central differences.

    ``du_dt`` and ``du_dx`` are checked against differences of ``u``; ``f`` is
    checked against differences of the (thereby verified) first derivatives,
    which keeps round-off far below the tolerance. For solutions singular at
    t = T, samples are restricted to ``t <= t_max_fraction * T`` (default 0.95).
    """
    if samples < 1:
        raise InvalidParameterError("need at least one sample")
    if t_max_fraction is None:
        t_max_fraction = 0.95 if sol.singular_at_T else 1.0
    rng = np.random.default_rng(seed)
    margin = 2 * step
    x = rng.uniform(margin, sol.L - margin, samples)
    t = rng.uniform(margin, t_max_fraction * sol.T - margin, samples)

    fd = {
        "du_dt": _richardson(lambda s: sol.u(x, s), t, step),
        "du_dx": _richardson(lambda s: sol.u(s, t), x, step),
    }
    fd["f"] = _richardson(lambda s: sol.du_dt(x, s), t, step) - _richardson(lambda s: sol.du_dx(s, t), x, step)
    exact = {"du_dt": sol.du_dt(x, t), "du_dx": sol.du_dx(x, t), "f": sol.f(x, t)}

    max_error, passed = {}, True
    for name in exact:
        ex = np.broadcast_to(exact[name], x.shape)
        err = np.abs(ex - fd[name])
        max_error[name] = float(err.max())
        passed &= bool(np.all(err <= atol + rtol * np.abs(ex)))
    return DerivativeReport(samples, max_error, passed)
