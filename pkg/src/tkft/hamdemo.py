"""Cotangent lift of a polynomial vector field, integrated numerically.

For ``X = sum_k x_k(q) d/dq_k`` the Hamiltonian ``H(q, p) = sum_i p_i x_i(q)``
gives ``dq/dt = X(q)`` and ``dp_k/dt = -sum_i p_i dx_i/dq_k``.  Starting on
``p = 0`` the flow stays there and its ``q`` part follows ``X``; the
functions below measure both facts with a classical fourth-order
Runge-Kutta integrator.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class PolyVectorField:
    """``components[i]`` maps exponent tuples to coefficients of ``x_i``."""

    components: tuple

    def __post_init__(self):
        comps = tuple({tuple(k): float(v) for k, v in dict(c).items()} for c in self.components)
        n = len(comps)
        for c in comps:
            if any(len(k) != n for k in c):
                raise ValueError(f"every exponent tuple needs {n} entries")
            if any(e < 0 for k in c for e in k):
                raise ValueError("exponents must be natural")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "_derivs", tuple(tuple(_diff(c, k) for k in range(n)) for c in comps))

    @property
    def dim(self) -> int:
        return len(self.components)

    def __call__(self, q: np.ndarray) -> np.ndarray:
        return np.array([_eval_poly(c, q) for c in self.components])

    def jacobian(self, q: np.ndarray) -> np.ndarray:
        """``J[i, k] = d x_i / d q_k``."""
        return np.array([[_eval_poly(d, q) for d in row] for row in self._derivs])


def _diff(poly: dict, k: int) -> dict:
    out: dict = {}
    for exps, c in poly.items():
        if exps[k]:
            e = list(exps)
            e[k] -= 1
            out[tuple(e)] = out.get(tuple(e), 0.0) + c * exps[k]
    return out


def _eval_poly(poly: dict, q) -> float:
    total = 0.0
    for exps, c in poly.items():
        term = c
        for x, e in zip(q, exps):
            if e:
                term *= x ** e
        total += term
    return total


def parse_poly(text: str, dim: int) -> dict:
    """Parse a sum of monomials such as ``"q1 - 0.5*q1^3*q2 + 2"``."""
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty polynomial")
    poly: dict = {}
    pos = 0
    while pos < len(src):
        m = re.match(r"([+-]?)([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)?((?:\*?q\d+(?:\^\d+)?)*)", src[pos:])
        if not m or m.end() == 0 or (not m.group(2) and not m.group(3)):
            raise ValueError(f"cannot parse polynomial at {src[pos:]!r}")
        coef = float(m.group(2)) if m.group(2) else 1.0
        if m.group(1) == "-":
            coef = -coef
        exps = [0] * dim
        for var, power in re.findall(r"q(\d+)(?:\^(\d+))?", m.group(3)):
            i = int(var) - 1
            if not 0 <= i < dim:
                raise ValueError(f"variable q{var} outside dimension {dim}")
            exps[i] += int(power) if power else 1
        key = tuple(exps)
        poly[key] = poly.get(key, 0.0) + coef
        pos += m.end()
        if pos < len(src) and src[pos] not in "+-":
            raise ValueError(f"cannot parse polynomial at {src[pos:]!r}")
    return poly


def parse_field(text: str) -> PolyVectorField:
    """Components separated by ``;``, e.g. ``"-q2; q1"``."""
    parts = [p for p in text.split(";")]
    return PolyVectorField(tuple(parse_poly(p, len(parts)) for p in parts))


DEMO_FIELDS = {
    "rotation": PolyVectorField(({(0, 1): -1.0}, {(1, 0): 1.0})),
    "cubic": PolyVectorField(({(0, 1): 1.0}, {(1, 0): -1.0, (3, 0): -1.0})),
    "zero": PolyVectorField(({}, {})),
}

DEMO_STARTS = {"rotation": (1.0, 0.0), "cubic": (0.5, 0.0), "zero": (1.0, 0.0)}


def hamiltonian_rhs(X: PolyVectorField, q, p) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return X(q), -X.jacobian(q).T @ p


def rk4_step(f: Callable, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + h / 2 * k1)
    k3 = f(y + h / 2 * k2)
    k4 = f(y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class UniversalityReport:
    max_p: float
    max_dq: float
    steps: int
    t_end: float
    aborted: bool = False
    reason: str = ""
    rows: list = field(default_factory=list, repr=False)

    def text(self) -> str:
        status = f"aborted at t={self.t_end:.6g}: {self.reason}" if self.aborted else "completed"
        return (f"steps {self.steps}\n"
                f"max |p| {self.max_p:.3e}\n"
                f"max |q - q_ref| {self.max_dq:.3e}\n"
                f"status {status}\n")

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "p_norm", "dq_norm"])
        for t, pn, dq in self.rows:
            w.writerow([f"{t:.6g}", f"{pn:.6e}", f"{dq:.6e}"])
        return buf.getvalue()


def verify_universality(X: PolyVectorField, q0, T: float = 1.0, h: float = 1e-3) -> UniversalityReport:
    """Integrate the lift from ``(q0, 0)`` and ``dq/dt = X(q)`` from ``q0`` with one method and step."""
    if h <= 0 or T <= 0:
        raise ValueError("step and horizon must be positive")
    n = X.dim
    q0 = np.asarray(q0, dtype=float)
    if q0.shape != (n,):
        raise ValueError(f"start point needs {n} coordinates")

    def lifted(y):
        dq, dp = hamiltonian_rhs(X, y[:n], y[n:])
        return np.concatenate([dq, dp])

    y = np.concatenate([q0, np.zeros(n)])
    q_ref = q0.copy()
    steps = int(round(T / h))
    report = UniversalityReport(0.0, 0.0, 0, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            y = rk4_step(lifted, y, h)
            q_ref = rk4_step(X, q_ref, h)
            if not (np.all(np.isfinite(y)) and np.all(np.isfinite(q_ref))):
                report.aborted = True
                report.reason = "numeric overflow"
                break
            pn = float(np.linalg.norm(y[n:]))
            dq = float(np.linalg.norm(y[:n] - q_ref))
            report.max_p = max(report.max_p, pn)
            report.max_dq = max(report.max_dq, dq)
            report.steps = k
            report.t_end = k * h
            report.rows.append((k * h, pn, dq))
    return report


def integrate(X: PolyVectorField, q0, T: float, h: float, dtype=np.float64) -> np.ndarray:
    """Endpoint of the lifted flow's ``q`` part at time ``T``, computed in ``dtype``."""
    n = X.dim
    h = dtype(h)

    def lifted(y):
        q, p = y[:n], y[n:]
        dq = np.array([_eval_poly(c, q) for c in X.components], dtype=dtype)
        jac = np.array([[_eval_poly(d, q) for d in row] for row in X._derivs], dtype=dtype)
        return np.concatenate([dq, -jac.T @ p])

    y = np.concatenate([np.asarray(q0, dtype=dtype), np.zeros(n, dtype=dtype)])
    for _ in range(int(round(T / float(h)))):
        y = rk4_step(lifted, y, h)
    return y[:n]


def convergence_ratio(X: PolyVectorField, q0, T: float, h: float, exact=None,
                      dtype=np.longdouble) -> float:
    """How much the global error shrinks when ``h`` is halved; about 16 at fourth order.

    With ``exact`` the errors are measured against it.  Otherwise the ratio
    of successive differences between runs at ``h``, ``h/2`` and ``h/4`` is
    used.  Extended precision keeps round-off below the truncation error
    at small steps.
    """
    a = integrate(X, q0, T, h, dtype)
    b = integrate(X, q0, T, h / 2, dtype)
    if exact is not None:
        ref = np.asarray(exact, dtype=dtype)
        return float(np.linalg.norm(a - ref) / np.linalg.norm(b - ref))
    c = integrate(X, q0, T, h / 4, dtype)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b - c))


def rotation_exact(q0, T: float, dtype=np.longdouble) -> np.ndarray:
    """Exact endpoint of the rotation field ``(-q2, q1)``."""
    T = dtype(T)
    c, s = np.cos(T), np.sin(T)
    q0 = np.asarray(q0, dtype=dtype)
    return np.array([c * q0[0] - s * q0[1], s * q0[0] + c * q0[1]], dtype=dtype)
