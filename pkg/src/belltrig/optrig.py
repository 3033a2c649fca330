"""Operator angles of symmetric positive definite matrices.

For a positive definite ``A`` with extreme eigenvalues ``m <= M``::

    cos phi(A) = min_x <Ax, x> / (||Ax|| ||x||) = 2 sqrt(mM) / (m + M)
    sin phi(A) = min_{eps > 0} ||eps A - I||    = (M - m) / (M + m)

so ``sin^2 + cos^2 = 1``.  The closed forms are the production path; the
``*_numeric`` functions minimize the defining expressions directly and serve
as independent checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize

from .config import DomainError, tolerances


@dataclass(frozen=True, eq=False)
class SpdOperator:
    """A real symmetric positive definite matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DomainError(f"operator must be a nonempty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("operator entries must be finite")
        scale = max(1.0, float(np.max(np.abs(a))))
        asym = float(np.max(np.abs(a - a.T)))
        if asym > 1e-12 * scale:
            raise DomainError(f"operator is not symmetric (max |A - A^T| = {asym:.3e})")
        a = (a + a.T) / 2.0
        eig = np.linalg.eigvalsh(a)
        if not eig[0] > 0.0:
            raise DomainError(f"operator is not positive definite (smallest eigenvalue {eig[0]:.3e})")
        a.setflags(write=False)
        eig.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "_eigenvalues", eig)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigenvalues  # type: ignore[attr-defined]

    @property
    def condition_number(self) -> float:
        return float(self.eigenvalues[-1] / self.eigenvalues[0])


def _spd(x: SpdOperator | ArrayLike) -> SpdOperator:
    return x if isinstance(x, SpdOperator) else SpdOperator(x)


@dataclass(frozen=True)
class OperatorAngles:
    sin_phi: float
    cos_phi: float


def cos_phi(A: SpdOperator | ArrayLike) -> float:
    A = _spd(A)
    m, M = float(A.eigenvalues[0]), float(A.eigenvalues[-1])
    return 2.0 * np.sqrt(m * M) / (m + M)


def sin_phi(B: SpdOperator | ArrayLike) -> float:
    B = _spd(B)
    m, M = float(B.eigenvalues[0]), float(B.eigenvalues[-1])
    return (M - m) / (M + m)


def operator_angles(B: SpdOperator | ArrayLike) -> OperatorAngles:
    B = _spd(B)
    return OperatorAngles(sin_phi(B), cos_phi(B))


def _quotient(x: np.ndarray, A: np.ndarray) -> float:
    Ax = A @ x
    return float(x @ Ax) / float(np.sqrt((Ax @ Ax) * (x @ x)))


def _quotient_grad(x: np.ndarray, A: np.ndarray) -> np.ndarray:
    Ax = A @ x
    s, p2, r2 = x @ Ax, Ax @ Ax, x @ x
    f = s / np.sqrt(p2 * r2)
    return f * (2.0 * Ax / s - (A @ Ax) / p2 - x / r2)


def cos_phi_numeric(
    A: SpdOperator | ArrayLike, seed: int = 0, samples: int = 64, refine: int = 4
) -> float:
    """Minimize ``<Ax,x>/(||Ax|| ||x||)`` directly.

    Random unit vectors are screened, then the ``refine`` best are polished
    with BFGS.  No eigen-decomposition is involved.
    """
    A = _spd(A)
    a = A.entries
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, A.n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    AX = X @ a
    vals = np.einsum("ij,ij->i", X, AX) / np.linalg.norm(AX, axis=1)
    best = float(vals.min())
    for x0 in X[np.argsort(vals)[:refine]]:
        res = optimize.minimize(
            _quotient, x0, args=(a,), jac=_quotient_grad, method="BFGS",
            options={"gtol": 1e-13, "maxiter": 10_000},
        )
        best = min(best, float(res.fun))
    return best


def golden_section(f, lo: float, hi: float, rel_tol: float = 1e-15, max_iter: int = 500) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if hi - lo <= rel_tol * max(abs(hi), abs(lo), 1e-300):
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def sin_phi_numeric(B: SpdOperator | ArrayLike) -> float:
    """Golden-section minimization of the spectral norm ``||eps B - I||`` over ``eps``.

    The objective is convex in ``eps``.  The optimum lies below ``2/M`` and
    ``2n/trace(B) >= 2/M``, so ``[0, 2n/trace(B)]`` brackets it without
    looking at eigenvalues.
    """
    B = _spd(B)
    b = B.entries
    eye = np.eye(B.n)
    hi = 2.0 * B.n / float(np.trace(b))
    _, value = golden_section(lambda eps: float(np.linalg.norm(eps * b - eye, 2)), 0.0, hi)
    return value


@dataclass(frozen=True)
class MinmaxReport:
    sin_phi: float
    cos_phi: float
    sum_of_squares: float
    holds: bool


def minmax_check(B: SpdOperator | ArrayLike) -> MinmaxReport:
    """Check ``sin^2 phi(B) + cos^2 phi(B) = 1``."""
    ang = operator_angles(B)
    total = ang.sin_phi**2 + ang.cos_phi**2
    return MinmaxReport(ang.sin_phi, ang.cos_phi, total, abs(total - 1.0) <= tolerances().minmax)


@dataclass(frozen=True)
class AccretivityReport:
    sin_phi_b: float
    cos_phi_a: float
    condition_holds: bool
    re_ba_min_eig: float
    accretive: bool


def accretivity_condition(A: SpdOperator | ArrayLike, B: SpdOperator | ArrayLike) -> AccretivityReport:
    """Compare ``sin phi(B) <= cos phi(A)`` with accretivity of ``BA``.

    The first is a sufficient condition for the second: whenever
    ``condition_holds`` is true, the symmetric part of ``BA`` is positive
    semidefinite.
    """
    A, B = _spd(A), _spd(B)
    if A.n != B.n:
        raise DomainError(f"dimension mismatch: A is {A.n}x{A.n}, B is {B.n}x{B.n}")
    tol = tolerances().accretive
    sb, ca = sin_phi(B), cos_phi(A)
    ba = B.entries @ A.entries
    re_ba = (ba + ba.T) / 2.0
    lam = float(np.linalg.eigvalsh(re_ba)[0])
    return AccretivityReport(sb, ca, sb <= ca + tol, lam, lam >= -tol)


def random_spd(
    n: int, seed: int | np.random.Generator = 0, max_condition: float = 1e4
) -> SpdOperator:
    """Random SPD matrix: Haar-ish rotation of log-uniform eigenvalues.

    The smallest eigenvalue is 1 and the condition number is drawn
    log-uniformly from ``[1, max_condition]``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    kappa = float(np.exp(rng.uniform(0.0, np.log(max_condition))))
    eig = np.exp(rng.uniform(0.0, np.log(kappa), n))
    eig[0] = 1.0
    if n > 1:
        eig[-1] = kappa
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    a = (q * eig) @ q.T
    return SpdOperator((a + a.T) / 2.0)
