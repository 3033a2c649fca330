"""Vectors, inner products, angles and Gram matrices.

The inner product is conjugate-linear in its first argument.  Angles between
vectors are taken from the *real part* of the inner product,
``cos(phi_xy) = Re<x, y>``, so they lie in ``[0, pi]`` for real and complex
spaces alike.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from .config import DomainError, tolerances

Field = Literal["real", "complex"]

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class StateVector:
    """An immutable finite-dimensional vector with real or complex entries."""

    components: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.components)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError(f"a vector needs a nonempty 1-D component list, got shape {arr.shape}")
        if np.iscomplexobj(arr):
            arr = arr.astype(np.complex128)
        elif np.issubdtype(arr.dtype, np.number) or arr.dtype == bool:
            arr = arr.astype(np.float64)
        else:
            raise DomainError(f"vector components must be numeric, got dtype {arr.dtype}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("vector components must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def dim(self) -> int:
        return int(self.components.shape[0])

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.components)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def is_unit(self, tol: float | None = None) -> bool:
        tol = tolerances().unit if tol is None else tol
        return abs(self.norm - 1.0) <= tol

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.components
        return self.components.astype(dtype)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return bool(np.array_equal(self.components, other.components))

    def __hash__(self) -> int:
        return hash(self.components.tobytes())

    def __repr__(self) -> str:
        return f"StateVector({self.components.tolist()!r})"


VectorLike = Union[StateVector, ArrayLike]


def as_array(x: VectorLike, name: str = "vector") -> np.ndarray:
    """Coerce to a validated 1-D numeric array."""
    if isinstance(x, StateVector):
        return x.components
    try:
        return StateVector(x).components
    except DomainError as exc:
        raise DomainError(f"{name}: {exc}") from None


def _require_same_dim(*named: tuple[str, np.ndarray]) -> None:
    dims = {name: arr.shape[-1] for name, arr in named}
    if len(set(dims.values())) > 1:
        detail = ", ".join(f"{k}={v}" for k, v in dims.items())
        raise DomainError(f"dimension mismatch: {detail}")


def _require_unit(arr: np.ndarray, name: str, tol: float) -> None:
    dev = abs(float(np.linalg.norm(arr)) - 1.0)
    if dev > tol:
        raise DomainError(f"{name} is not a unit vector (|norm - 1| = {dev:.3e})")


def normalize(x: VectorLike) -> StateVector:
    """Return ``x / ||x||``; the zero vector is rejected."""
    arr = as_array(x)
    n = np.linalg.norm(arr)
    if n == 0.0:
        raise DomainError("cannot normalize the zero vector")
    return StateVector(arr / n)


def inner_product(x: VectorLike, y: VectorLike) -> complex:
    """Sesquilinear inner product, conjugating the first argument."""
    xa, ya = as_array(x, "x"), as_array(y, "y")
    _require_same_dim(("x", xa), ("y", ya))
    return complex(np.vdot(xa, ya))


def angle_between(x: VectorLike, y: VectorLike) -> float:
    """Angle in ``[0, pi]`` with cosine ``Re<x, y>``.  Both inputs must be unit."""
    tol = tolerances().angle
    xa, ya = as_array(x, "x"), as_array(y, "y")
    _require_same_dim(("x", xa), ("y", ya))
    _require_unit(xa, "x", tol)
    _require_unit(ya, "y", tol)
    return float(np.arccos(np.clip(np.vdot(xa, ya).real, -1.0, 1.0)))


def real_cosines_many(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise ``Re<x_i, y_i>`` for stacked vectors of shape ``(..., dim)``."""
    return np.einsum("...i,...i->...", np.conj(x), y).real


def angles_many(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.arccos(np.clip(real_cosines_many(x, y), -1.0, 1.0))


@dataclass(frozen=True)
class TriangleReport:
    phi_xy: float
    phi_yz: float
    phi_xz: float
    slack: float
    satisfied: bool


def triangle_check(x: VectorLike, y: VectorLike, z: VectorLike) -> TriangleReport:
    """Check ``phi_xz <= phi_xy + phi_yz`` for three unit vectors."""
    xa, ya, za = as_array(x, "x"), as_array(y, "y"), as_array(z, "z")
    _require_same_dim(("x", xa), ("y", ya), ("z", za))
    phi_xy = angle_between(xa, ya)
    phi_yz = angle_between(ya, za)
    phi_xz = angle_between(xa, za)
    slack = phi_xy + phi_yz - phi_xz
    return TriangleReport(phi_xy, phi_yz, phi_xz, slack, slack >= -tolerances().angle)


def triangle_slack_many(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Vectorized ``phi_xy + phi_yz - phi_xz`` over stacked unit vectors."""
    return angles_many(x, y) + angles_many(y, z) - angles_many(x, z)


@dataclass(frozen=True)
class CosineTriple:
    """Real cosines ``a1 = cos phi_xy``, ``a2 = cos phi_yz``, ``a3 = cos phi_xz``."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "a3"):
            v = float(getattr(self, name))
            if not -1.0 <= v <= 1.0:
                raise DomainError(f"cosine {name}={v!r} is outside [-1, 1]")
            object.__setattr__(self, name, v)

    @classmethod
    def from_vectors(cls, x: VectorLike, y: VectorLike, z: VectorLike) -> "CosineTriple":
        xa, ya, za = as_array(x, "x"), as_array(y, "y"), as_array(z, "z")
        _require_same_dim(("x", xa), ("y", ya), ("z", za))
        c = np.clip([np.vdot(xa, ya).real, np.vdot(ya, za).real, np.vdot(xa, za).real], -1.0, 1.0)
        return cls(*c)

    @classmethod
    def from_angles(cls, phi_xy: float, phi_yz: float, phi_xz: float) -> "CosineTriple":
        return cls(*np.clip(np.cos([phi_xy, phi_yz, phi_xz]), -1.0, 1.0))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)


def gram_determinant(a1, a2, a3):
    """Closed form ``1 + 2 a1 a2 a3 - (a1^2 + a2^2 + a3^2)``; works elementwise."""
    a1, a2, a3 = np.asarray(a1), np.asarray(a2), np.asarray(a3)
    return 1.0 + 2.0 * a1 * a2 * a3 - (a1 * a1 + a2 * a2 + a3 * a3)


def cosine_form_slacks(a1, a2, a3):
    """Slacks of the two printed forms of the cosine feasibility inequality.

    Form A: ``cos^2 a + cos^2 b + cos^2 c - 1 <= 2 cos a cos b cos c``
    (slack = right - left).  Form B: ``1 - a1^2 - a2^2 - a3^2 + 2 a1 a2 a3 >= 0``.
    Both are built from the same sum of squares and triple product, so they
    agree bit for bit.
    """
    a1, a2, a3 = np.asarray(a1), np.asarray(a2), np.asarray(a3)
    squares = a1 * a1 + a2 * a2 + a3 * a3
    product = 2.0 * a1 * a2 * a3
    form_a = product - (squares - 1.0)
    form_b = (1.0 - squares) + product
    return form_a, form_b


@dataclass(frozen=True)
class GramReport:
    matrix: np.ndarray
    determinant: float
    feasible: bool
    coplanar: bool
    slack: float
    form_a_slack: float
    form_b_slack: float
    forms_agree: bool


def gram_feasibility(c: CosineTriple | Sequence[float]) -> GramReport:
    """Decide whether three cosines can come from three unit vectors.

    Feasible iff the 3x3 Gram matrix is positive semidefinite, i.e. its
    determinant is nonnegative.  Determinants in ``[-tol, 0)`` count as
    feasible; the computed value is reported unchanged.
    """
    if not isinstance(c, CosineTriple):
        c = CosineTriple(*c)
    tol = tolerances().feasibility
    a1, a2, a3 = c.as_tuple()
    matrix = np.array([[1.0, a1, a3], [a1, 1.0, a2], [a3, a2, 1.0]])
    det = float(gram_determinant(a1, a2, a3))
    fa, fb = cosine_form_slacks(a1, a2, a3)
    fa, fb = float(fa), float(fb)
    forms_agree = fa == fb and (fa >= -tol) == (fb >= -tol)
    return GramReport(
        matrix=matrix,
        determinant=det,
        feasible=det >= -tol,
        coplanar=abs(det) <= tol,
        slack=det,
        form_a_slack=fa,
        form_b_slack=fb,
        forms_agree=forms_agree,
    )


def realize_cosines(c: CosineTriple | Sequence[float]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Construct real unit vectors ``x, y, z`` in R^3 with the given cosines.

    ``x = e1``, ``y`` in span{e1, e2}, and ``z`` solved from the remaining two
    cosines.  Infeasible triples raise.
    """
    if not isinstance(c, CosineTriple):
        c = CosineTriple(*c)
    report = gram_feasibility(c)
    if not report.feasible:
        raise DomainError(f"cosines {c.as_tuple()} are not realizable (determinant {report.determinant:.3e})")
    a1, a2, a3 = c.as_tuple()
    s1 = np.sqrt(max(0.0, 1.0 - a1 * a1))
    x = np.array([1.0, 0.0, 0.0])
    y = np.array([a1, s1, 0.0])
    if s1 > 0.0:
        z2 = float(np.clip((a2 - a1 * a3) / s1, -1.0, 1.0))
    else:
        # y = +-x; feasibility forces a2 = a1*a3, any z2 with z1 = a3 works
        z2 = np.sqrt(max(0.0, 1.0 - a3 * a3))
    z3 = np.sqrt(max(0.0, 1.0 - a3 * a3 - z2 * z2))
    z = np.array([a3, z2, z3])
    return x, y, z / np.linalg.norm(z)


def gram_matrix(vectors: Sequence[VectorLike]) -> np.ndarray:
    """Matrix of pairwise inner products, entry ``(i, j) = <v_i, v_j>``."""
    if len(vectors) == 0:
        raise DomainError("gram_matrix needs at least one vector")
    arrs = [as_array(v, f"vectors[{i}]") for i, v in enumerate(vectors)]
    _require_same_dim(*((f"vectors[{i}]", a) for i, a in enumerate(arrs)))
    V = np.stack([a.astype(np.complex128) for a in arrs])
    return V.conj() @ V.T


def min_eigenvalue(hermitian: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitian)[0])


def _rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed) & _SEED_MASK)


def random_unit_vectors(
    n: int, dim: int, field: Field = "real", seed: int | np.random.Generator = 0
) -> np.ndarray:
    """``n`` independent uniformly distributed unit vectors, shape ``(n, dim)``."""
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    if field not in ("real", "complex"):
        raise DomainError(f"field must be 'real' or 'complex', got {field!r}")
    rng = _rng(seed)
    v = rng.standard_normal((n, dim))
    if field == "complex":
        v = v + 1j * rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_unit_vector(dim: int, field: Field = "real", seed: int | np.random.Generator = 0) -> StateVector:
    """Seeded unit vector with independent standard-normal components, normalized."""
    return StateVector(random_unit_vectors(1, dim, field, seed)[0])
