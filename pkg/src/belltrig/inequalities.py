"""Bell, Wigner and CHSH inequalities and their exact equality forms.

Quantum singlet correlations use ``E(u, v) = -u.v`` throughout.  The CHSH
expression for unit vectors satisfies the identity

    |a.b + a.c + d.b - d.c|
        = 2 |cos(t/2) cos(a, b+c) + sin(t/2) cos(d, b-c)|
        = 2 sqrt(cos^2(a, b+c) + cos^2(d, b-c)) |cos(u1, u2)|

with ``t`` the angle between ``b`` and ``c``, ``u1 = (cos t/2, sin t/2)`` and
``u2 = (cos(a, b+c), cos(d, b-c))``.  The kernel below evaluates every side
on stacked configurations so large random batches stay cheap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .config import DomainError, tolerances
from .geometry import CosineTriple, VectorLike, as_array

TSIRELSON = 2.0 * math.sqrt(2.0)


class Region(str, enum.Enum):
    CLASSICAL = "classical"
    QUANTUM_VIOLATION = "quantum_violation"
    IMPOSSIBLE = "impossible"

    def __str__(self) -> str:
        return self.value


def classify_chsh(value: float) -> Region:
    """``[0, 2]`` classical, ``(2, 2 sqrt 2]`` violation, above that impossible."""
    tol = tolerances().region
    if value <= 2.0 + tol:
        return Region.CLASSICAL
    if value <= TSIRELSON + tol:
        return Region.QUANTUM_VIOLATION
    return Region.IMPOSSIBLE


def _check_correlation(name: str, value: float) -> float:
    value = float(value)
    if not -1.0 <= value <= 1.0:
        raise DomainError(f"correlation {name}={value!r} is outside [-1, 1]")
    return value


@dataclass(frozen=True)
class InequalityReport:
    slack: float
    satisfied: bool


def bell_1964(p_ab: float, p_ac: float, p_bc: float) -> InequalityReport:
    """Bell's original form ``|P(a,b) - P(a,c)| <= 1 + P(b,c)``."""
    p_ab = _check_correlation("p_ab", p_ab)
    p_ac = _check_correlation("p_ac", p_ac)
    p_bc = _check_correlation("p_bc", p_bc)
    slack = 1.0 + p_bc - abs(p_ab - p_ac)
    return InequalityReport(slack, slack >= -tolerances().feasibility)


# -- Wigner -----------------------------------------------------------------


class Convention(str, enum.Enum):
    """How a direction angle enters the joint probability.

    Spin-1/2 pairs use half angles, ``1/2 sin^2(theta/2)``; polarized photon
    pairs use full angles, ``1/2 sin^2(theta)``.
    """

    SPIN = "half_angle_spin"
    PHOTON = "full_angle_photon"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: "str | Convention") -> "Convention":
        if isinstance(text, Convention):
            return text
        key = str(text).strip().lower()
        aliases = {"spin": cls.SPIN, "photon": cls.PHOTON}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(
                f"unknown convention {text!r}; expected spin, photon, half_angle_spin or full_angle_photon"
            ) from None

    def effective_angle(self, theta):
        return np.asarray(theta) / 2.0 if self is Convention.SPIN else np.asarray(theta)


def _check_angle(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= math.pi:
        raise DomainError(f"angle {name}={value!r} is outside [0, pi]")
    return value


@dataclass(frozen=True)
class WignerConfig:
    theta_12: float
    theta_23: float
    theta_13: float
    convention: Convention

    def __post_init__(self) -> None:
        for name in ("theta_12", "theta_23", "theta_13"):
            object.__setattr__(self, name, _check_angle(name, getattr(self, name)))
        object.__setattr__(self, "convention", Convention.parse(self.convention))

    def cosines(self) -> CosineTriple:
        """Cosines of the effective angles (half angles for spin)."""
        eff = self.convention.effective_angle([self.theta_12, self.theta_23, self.theta_13])
        return CosineTriple(*np.clip(np.cos(eff), -1.0, 1.0))


def same_sign_probability(theta, convention: Convention | str):
    """``P(++)`` (equal to ``P(--)``): ``1/2 sin^2`` of the effective angle."""
    eff = Convention.parse(convention).effective_angle(theta)
    return 0.5 * np.sin(eff) ** 2


@dataclass(frozen=True)
class WignerReport:
    lhs: float
    rhs: float
    slack: float
    satisfied: bool


def wigner_inequality(cfg: WignerConfig) -> WignerReport:
    """``P12 + P23 >= P13`` with ``Pik = 1/2 sin^2`` of the effective angle."""
    p = same_sign_probability([cfg.theta_12, cfg.theta_23, cfg.theta_13], cfg.convention)
    lhs, rhs = float(p[0] + p[1]), float(p[2])
    slack = lhs - rhs
    return WignerReport(lhs, rhs, slack, slack >= -tolerances().feasibility)


def wigner_equality_sides(cfg: WignerConfig) -> tuple[float, float]:
    """Both sides of the equality form for a coplanar triple.

    Left: ``sin^2 t12 + sin^2 t23 - sin^2 t13``; right:
    ``2 cos t13 (cos t13 - cos t12 cos t23)``, with ``t`` the effective
    angles.  They are equal exactly when the directions are coplanar; in
    general ``left - right`` is the Gram determinant.
    """
    t12, t23, t13 = cfg.convention.effective_angle([cfg.theta_12, cfg.theta_23, cfg.theta_13])
    left = math.sin(t12) ** 2 + math.sin(t23) ** 2 - math.sin(t13) ** 2
    c12, c23, c13 = math.cos(t12), math.cos(t23), math.cos(t13)
    right = 2.0 * c13 * (c13 - c12 * c23)
    return left, right


def wigner_identity_rhs(a1, a2, a3):
    return 2.0 * np.asarray(a3) * (np.asarray(a3) - np.asarray(a1) * np.asarray(a2))


def wigner_identity_gap(c: CosineTriple | tuple[float, float, float]) -> float:
    """``[(1-a1^2) + (1-a2^2) - (1-a3^2)] - 2 a3 (a3 - a1 a2)``.

    Algebraically identical to the Gram determinant; zero iff coplanar.
    """
    if not isinstance(c, CosineTriple):
        c = CosineTriple(*c)
    return float(wigner_identity_gap_many(c.a1, c.a2, c.a3))


def wigner_identity_gap_many(a1, a2, a3):
    a1, a2, a3 = np.asarray(a1), np.asarray(a2), np.asarray(a3)
    left = (1.0 - a1 * a1) + (1.0 - a2 * a2) - (1.0 - a3 * a3)
    return left - wigner_identity_rhs(a1, a2, a3)


# -- CHSH -------------------------------------------------------------------


@dataclass(frozen=True)
class ChshSumReport:
    value: float
    satisfied: bool


def chsh_sum(e_ab: float, e_ac: float, e_db: float, e_dc: float) -> ChshSumReport:
    """``|E(a,b) + E(a,c) + E(d,b) - E(d,c)|`` against the classical bound 2."""
    vals = [_check_correlation(n, v) for n, v in (("e_ab", e_ab), ("e_ac", e_ac), ("e_db", e_db), ("e_dc", e_dc))]
    value = abs(vals[0] + vals[1] + vals[2] - vals[3])
    return ChshSumReport(value, value <= 2.0 + tolerances().feasibility)


def quantum_correlation(u: VectorLike, v: VectorLike) -> float:
    """Singlet correlation ``E(u, v) = -u.v`` for real directions."""
    ua, va = as_array(u, "u"), as_array(v, "v")
    if ua.shape != va.shape:
        raise DomainError(f"dimension mismatch: u={ua.shape[0]}, v={va.shape[0]}")
    return float(-np.real(np.dot(ua, va)))


@dataclass(frozen=True, eq=False)
class ChshConfig:
    """Four real unit directions of a common dimension >= 2."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        tol = tolerances().unit
        dim = None
        for name in "abcd":
            arr = as_array(getattr(self, name), name)
            if np.iscomplexobj(arr):
                raise DomainError(f"{name} must be a real vector")
            if dim is None:
                dim = arr.shape[0]
            if arr.shape[0] != dim:
                raise DomainError(f"dimension mismatch: a has {dim} components, {name} has {arr.shape[0]}")
            dev = abs(float(np.linalg.norm(arr)) - 1.0)
            if dev > tol:
                raise DomainError(f"{name} is not a unit vector (|norm - 1| = {dev:.3e})")
            object.__setattr__(self, name, arr)
        if dim < 2:
            raise DomainError(f"CHSH directions need dimension >= 2, got {dim}")

    @classmethod
    def normalized(cls, a: VectorLike, b: VectorLike, c: VectorLike, d: VectorLike) -> "ChshConfig":
        vecs = []
        for name, v in zip("abcd", (a, b, c, d)):
            arr = as_array(v, name).astype(float)
            n = np.linalg.norm(arr)
            if n == 0.0:
                raise DomainError(f"{name} is the zero vector")
            vecs.append(arr / n)
        return cls(*vecs)

    @property
    def dim(self) -> int:
        return int(self.a.shape[0])

    def stacked(self) -> np.ndarray:
        return np.stack([self.a, self.b, self.c, self.d])


def planar_config(theta_a: float, theta_b: float, theta_c: float, theta_d: float) -> ChshConfig:
    """Directions in the plane at the given polar angles (radians)."""
    t = np.array([theta_a, theta_b, theta_c, theta_d], dtype=float)
    v = np.stack([np.cos(t), np.sin(t)], axis=-1)
    return ChshConfig(*v)


def planar_family_config(phi: float) -> ChshConfig:
    """d, b, a, c at polar angles 0, phi, 2 phi, 3 phi.

    Three of the four pairs then sit at angle ``phi`` and the subtracted pair
    ``(d, c)`` at ``3 phi``, so the CHSH value is ``|3 cos phi - cos 3 phi|``.
    """
    return planar_config(2.0 * phi, phi, 3.0 * phi, 0.0)


def chsh_kernel(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> dict[str, np.ndarray]:
    """Evaluate the CHSH expression and both equality forms on stacked vectors.

    Inputs have shape ``(..., dim)``.  When ``b = -c`` (or ``b = c``) the
    direction ``b + c`` (or ``b - c``) is undefined; its cosine is set to 0,
    which is harmless because its coefficient ``cos(t/2)`` (or ``sin(t/2)``)
    is 0 there.
    """
    dot = lambda u, v: np.einsum("...i,...i->...", u, v)  # noqa: E731
    lhs = np.abs(dot(a, b) + dot(a, c) + dot(d, b) - dot(d, c))

    bpc, bmc = b + c, b - c
    n_plus = np.sqrt(dot(bpc, bpc))
    n_minus = np.sqrt(dot(bmc, bmc))
    half = np.arctan2(n_minus, n_plus)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_a = np.where(n_plus > 0.0, dot(a, bpc) / np.where(n_plus > 0.0, n_plus, 1.0), 0.0)
        cos_d = np.where(n_minus > 0.0, dot(d, bmc) / np.where(n_minus > 0.0, n_minus, 1.0), 0.0)
    u1x, u1y = np.cos(half), np.sin(half)
    inner = u1x * cos_a + u1y * cos_d
    equality_rhs = 2.0 * np.abs(inner)

    magnitude = np.hypot(cos_a, cos_d)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_u = np.where(magnitude > 0.0, inner / (np.hypot(u1x, u1y) * np.where(magnitude > 0.0, magnitude, 1.0)), 0.0)
    cosine_factor = np.abs(cos_u)
    return {
        "lhs": lhs,
        "equality_rhs": equality_rhs,
        "magnitude_factor": magnitude,
        "cosine_factor": cosine_factor,
        "factor_rhs": 2.0 * magnitude * cosine_factor,
        "theta_bc": 2.0 * half,
        "cos_a_bpc": cos_a,
        "cos_d_bmc": cos_d,
    }


@dataclass(frozen=True)
class ChshReport:
    lhs: float
    equality_rhs: float
    magnitude_factor: float
    cosine_factor: float
    theta_bc: float
    region: Region
    u1: tuple[float, float]
    u2: tuple[float, float]

    @property
    def factor_rhs(self) -> float:
        return 2.0 * self.magnitude_factor * self.cosine_factor

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "equality_rhs": self.equality_rhs,
            "factor_form": {
                "magnitude_factor": self.magnitude_factor,
                "cosine_factor": self.cosine_factor,
            },
            "theta_bc": self.theta_bc,
            "region": self.region.value,
        }


def chsh_quantum(cfg: ChshConfig) -> ChshReport:
    """Quantum CHSH value of a configuration together with its equality forms.

    The identity residual is checked on every call; exceeding the tolerance
    raises :class:`DomainError`.
    """
    k = chsh_kernel(cfg.a, cfg.b, cfg.c, cfg.d)
    lhs = float(k["lhs"])
    rhs = float(k["equality_rhs"])
    tol = tolerances().identity
    if abs(lhs - rhs) > tol or abs(lhs - float(k["factor_rhs"])) > tol:
        raise DomainError(f"equality residual too large: lhs={lhs!r}, rhs={rhs!r}")
    half = float(k["theta_bc"]) / 2.0
    return ChshReport(
        lhs=lhs,
        equality_rhs=rhs,
        magnitude_factor=float(k["magnitude_factor"]),
        cosine_factor=float(k["cosine_factor"]),
        theta_bc=float(k["theta_bc"]),
        region=classify_chsh(lhs),
        u1=(math.cos(half), math.sin(half)),
        u2=(float(k["cos_a_bpc"]), float(k["cos_d_bmc"])),
    )


def chsh_bound_curve(phi: float) -> float:
    """Cauchy-Schwarz envelope ``sqrt(2 + 2 cos phi) + sqrt(2 - 2 cos phi)``."""
    phi = _check_angle("phi", phi)
    c = math.cos(phi)
    return math.sqrt(max(0.0, 2.0 + 2.0 * c)) + math.sqrt(max(0.0, 2.0 - 2.0 * c))


def chsh_one_parameter_family(phi):
    """``|3 cos phi - cos 3 phi|``, the CHSH value of :func:`planar_family_config`."""
    phi_arr = np.asarray(phi, dtype=float)
    if np.any((phi_arr < 0.0) | (phi_arr > math.pi)):
        raise DomainError("phi must lie in [0, pi]")
    out = np.abs(3.0 * np.cos(phi_arr) - np.cos(3.0 * phi_arr))
    return float(out) if out.ndim == 0 else out
