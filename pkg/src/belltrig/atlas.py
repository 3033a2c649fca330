"""Parameter sweeps, violation regions, boundary tracing and CHSH maximization."""

from __future__ import annotations

import csv
import enum
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import optimize

from .config import DomainError, tolerances
from .geometry import random_unit_vectors
from .inequalities import (
    TSIRELSON,
    Convention,
    Region,
    chsh_kernel,
    chsh_one_parameter_family,
    classify_chsh,
    same_sign_probability,
)

MAX_CELLS = 10**8


class Family(str, enum.Enum):
    WIGNER_COPLANAR = "wigner_coplanar"
    CHSH_PLANAR_FAMILY = "chsh_planar_family"
    CHSH_PLANAR_GRID = "chsh_planar_grid"

    def __str__(self) -> str:
        return self.value


PARAM_NAMES = {
    Family.WIGNER_COPLANAR: ("theta_12", "theta_23"),
    Family.CHSH_PLANAR_FAMILY: ("phi",),
    Family.CHSH_PLANAR_GRID: ("theta_a", "theta_b", "theta_c", "theta_d"),
}


@dataclass(frozen=True)
class ParamRange:
    lo: float
    hi: float
    step: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and math.isfinite(self.step)):
            raise DomainError("range bounds and step must be finite")
        if not self.step > 0.0:
            raise DomainError(f"step must be > 0, got {self.step!r}")
        if self.lo > self.hi:
            raise DomainError(f"range lo={self.lo!r} exceeds hi={self.hi!r}")

    @property
    def size(self) -> int:
        return int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1

    def points(self) -> np.ndarray:
        return np.minimum(self.lo + self.step * np.arange(self.size), self.hi)


@dataclass(frozen=True)
class SweepSpec:
    family: Family
    ranges: tuple[ParamRange, ...]
    convention: Convention | None = None

    def __post_init__(self) -> None:
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        ranges = tuple(r if isinstance(r, ParamRange) else ParamRange(*r) for r in self.ranges)
        object.__setattr__(self, "ranges", ranges)
        expected = len(PARAM_NAMES[fam])
        if len(ranges) != expected:
            raise DomainError(f"{fam.value} takes {expected} parameter range(s), got {len(ranges)}")
        if fam is Family.WIGNER_COPLANAR:
            if self.convention is None:
                raise DomainError("wigner_coplanar sweeps need an explicit convention")
            object.__setattr__(self, "convention", Convention.parse(self.convention))
            for name, r in zip(PARAM_NAMES[fam], ranges):
                if r.lo < 0.0 or r.hi > math.pi:
                    raise DomainError(f"{name} range must lie in [0, pi]")
        if fam is Family.CHSH_PLANAR_FAMILY and (ranges[0].lo < 0.0 or ranges[0].hi > math.pi):
            raise DomainError("phi range must lie in [0, pi]")
        if self.cells > MAX_CELLS:
            raise DomainError(f"sweep has {self.cells} cells, above the guard of {MAX_CELLS}")

    @property
    def param_names(self) -> tuple[str, ...]:
        return PARAM_NAMES[self.family]

    @property
    def cells(self) -> int:
        return math.prod(r.size for r in self.ranges)

    def grid(self) -> np.ndarray:
        """All parameter tuples, shape ``(cells, k)``, first parameter slowest."""
        axes = np.meshgrid(*(r.points() for r in self.ranges), indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=-1)


@dataclass(frozen=True)
class ViolationRecord:
    params: tuple[float, ...]
    value: float
    region: Region
    slack: float


def fold_angle(total):
    """Map a sum of two angles in ``[0, 2 pi]`` back to ``[0, pi]``."""
    total = np.asarray(total, dtype=float)
    out = np.where(total <= math.pi, total, 2.0 * math.pi - total)
    return float(out) if out.ndim == 0 else out


def _records(params: np.ndarray, values: np.ndarray, regions: Sequence[Region], slacks: np.ndarray) -> list[ViolationRecord]:
    return [
        ViolationRecord(tuple(float(x) for x in p), float(v), r, float(s))
        for p, v, r, s in zip(params, values, regions, slacks)
    ]


def sweep_wigner(spec: SweepSpec) -> list[ViolationRecord]:
    """Coplanar Wigner sweep over ``(theta_12, theta_23)``.

    ``theta_13`` is the folded sum.  ``value`` is the left side ``P12 + P23``
    and ``slack`` is ``P12 + P23 - P13``.
    """
    if spec.family is not Family.WIGNER_COPLANAR:
        raise DomainError(f"sweep_wigner needs family wigner_coplanar, got {spec.family.value}")
    grid = spec.grid()
    t12, t23 = grid[:, 0], grid[:, 1]
    t13 = fold_angle(t12 + t23)
    p12 = same_sign_probability(t12, spec.convention)
    p23 = same_sign_probability(t23, spec.convention)
    p13 = same_sign_probability(t13, spec.convention)
    lhs = p12 + p23
    slack = lhs - p13
    tol = tolerances().feasibility
    regions = [Region.CLASSICAL if s >= -tol else Region.QUANTUM_VIOLATION for s in slack]
    return _records(grid, lhs, regions, slack)


def _planar(theta: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def sweep_chsh(spec: SweepSpec) -> list[ViolationRecord]:
    """CHSH sweep over the one-parameter planar family or a 4-angle planar grid.

    ``slack`` is ``2 - value``: negative inside the violation region.
    """
    grid = spec.grid()
    if spec.family is Family.CHSH_PLANAR_FAMILY:
        phi = grid[:, 0]
        # d, b, a, c at 0, phi, 2 phi, 3 phi
        a, b, c, d = _planar(2.0 * phi), _planar(phi), _planar(3.0 * phi), _planar(np.zeros_like(phi))
    elif spec.family is Family.CHSH_PLANAR_GRID:
        a, b, c, d = (_planar(grid[:, j]) for j in range(4))
    else:
        raise DomainError(f"sweep_chsh needs a CHSH family, got {spec.family.value}")
    values = chsh_kernel(a, b, c, d)["lhs"]
    regions = [classify_chsh(v) for v in values]
    n_bad = sum(r is Region.IMPOSSIBLE for r in regions)
    if n_bad:
        warnings.warn(f"{n_bad} sweep cell(s) exceed 2*sqrt(2); numerical self-test failure", RuntimeWarning)
    return _records(grid, values, regions, 2.0 - values)


def region_of(record: ViolationRecord, family: Family) -> Region:
    """Recompute a record's region from its stored numbers."""
    if Family(family) is Family.WIGNER_COPLANAR:
        return Region.CLASSICAL if record.slack >= -tolerances().feasibility else Region.QUANTUM_VIOLATION
    return classify_chsh(record.value)


# -- maximization -----------------------------------------------------------


@dataclass(frozen=True)
class MaximizeResult:
    best_value: float
    best_params: tuple[tuple[float, ...], ...]
    theta_bc_at_max: float
    cos_u1_u2: float
    iterations: int
    start_index: int


def _chsh_value(x: np.ndarray, dim: int) -> float:
    v = x.reshape(4, dim)
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    a, b, c, d = v
    return abs(a @ b + a @ c + d @ b - d @ c)


def _objective(x: np.ndarray, dim: int) -> float:
    # the norm penalty pins the scale so the simplex can contract in every direction
    sq = np.sum(x.reshape(4, dim) ** 2, axis=1)
    return -_chsh_value(x, dim) + float(np.sum((sq - 1.0) ** 2))


def maximize_chsh(dim: int, seed: int = 0, starts: int = 24, xatol: float = 1e-10) -> MaximizeResult:
    """Multi-start Nelder-Mead over four unit vectors in ``R^dim``.

    Starts are independent, each seeded from ``(seed, start)``.  The best
    start wins; ties go to the lowest start index.
    """
    if not 2 <= dim <= 8:
        raise DomainError(f"dim must be in [2, 8], got {dim}")
    if starts < 1:
        raise DomainError("need at least one start")
    best_x, best_val, best_idx, total_iter = None, -math.inf, -1, 0
    for s in range(starts):
        x0 = random_unit_vectors(4, dim, "real", np.random.default_rng([int(seed) & ((1 << 64) - 1), s])).ravel()
        res = optimize.minimize(
            _objective, x0, args=(dim,), method="Nelder-Mead",
            options={"xatol": xatol, "fatol": 1e-15, "maxiter": 4000 * 4 * dim,
                     "maxfev": 4000 * 4 * dim, "adaptive": True},
        )
        total_iter += int(res.nit)
        val = _chsh_value(res.x, dim)
        if val > best_val:
            best_x, best_val, best_idx = res.x, val, s
    v = best_x.reshape(4, dim)
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    k = chsh_kernel(*v)
    return MaximizeResult(
        best_value=float(k["lhs"]),
        best_params=tuple(tuple(float(t) for t in row) for row in v),
        theta_bc_at_max=float(k["theta_bc"]),
        cos_u1_u2=float(k["cosine_factor"]),
        iterations=total_iter,
        start_index=best_idx,
    )


# -- boundary ---------------------------------------------------------------


def trace_boundary(family: Family | str = Family.CHSH_PLANAR_FAMILY, samples: int = 4097, xtol: float = 1e-12) -> list[float]:
    """Angles in ``[0, pi]`` where the planar family value equals 2.

    Sign changes of ``value - 2`` on a uniform grid are refined by bisection;
    grid points already at 2 (the tangential touch at ``phi = 0`` and the
    endpoint ``phi = pi``) are kept as they are.
    """
    if Family(family) is not Family.CHSH_PLANAR_FAMILY:
        raise DomainError("trace_boundary supports the chsh_planar_family only")
    g = lambda phi: chsh_one_parameter_family(phi) - 2.0  # noqa: E731
    phis = np.linspace(0.0, math.pi, samples)
    vals = g(phis)
    tol = tolerances().feasibility
    roots: list[float] = [float(p) for p, v in zip(phis, vals) if abs(v) <= tol]
    for i in range(samples - 1):
        lo, hi = vals[i], vals[i + 1]
        if abs(lo) > tol and abs(hi) > tol and (lo < 0.0) != (hi < 0.0):
            roots.append(float(optimize.bisect(g, phis[i], phis[i + 1], xtol=xtol)))
    roots.sort()
    out: list[float] = []
    for r in roots:
        if not out or r - out[-1] > 1e-9:
            out.append(r)
    return out


# -- export -----------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _infer_format(path: Path, fmt: str | None) -> str:
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower() or "csv"
    if fmt not in ("csv", "json"):
        raise DomainError(f"unsupported atlas format {fmt!r}; use csv or json")
    return fmt


def export_atlas(
    records: Sequence[ViolationRecord],
    path: str | Path,
    fmt: str | None = None,
    param_names: Sequence[str] | None = None,
) -> None:
    """Write records as CSV (17 significant digits) or JSON.

    The format defaults to the file extension.  CSV columns are the
    parameters followed by ``value,slack,region``.
    """
    if not records:
        raise DomainError("export_atlas needs at least one record")
    path = Path(path)
    fmt = _infer_format(path, fmt)
    k = len(records[0].params)
    if any(len(r.params) != k for r in records):
        raise DomainError("records have differing parameter counts")
    names = list(param_names) if param_names is not None else [f"param{i + 1}" for i in range(k)]
    if len(names) != k:
        raise DomainError(f"{len(names)} parameter names for {k} parameters")
    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([*names, "value", "slack", "region"])
            for r in records:
                w.writerow([*map(_fmt, r.params), _fmt(r.value), _fmt(r.slack), r.region.value])
    else:
        rows = [
            {**dict(zip(names, r.params)), "value": r.value, "slack": r.slack, "region": r.region.value}
            for r in records
        ]
        with path.open("w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=1)
            fh.write("\n")


def read_atlas(path: str | Path, fmt: str | None = None) -> tuple[list[str], list[ViolationRecord]]:
    """Inverse of :func:`export_atlas`; returns ``(param_names, records)``."""
    path = Path(path)
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    else:
        rows = json.loads(path.read_text(encoding="utf-8"))
    if not rows:
        return [], []
    names = [k for k in rows[0] if k not in ("value", "slack", "region")]
    records = [
        ViolationRecord(
            tuple(float(row[n]) for n in names), float(row["value"]), Region(row["region"]), float(row["slack"])
        )
        for row in rows
    ]
    return names, records


__all__ = [
    "Family", "ParamRange", "SweepSpec", "ViolationRecord", "MaximizeResult", "MAX_CELLS", "TSIRELSON",
    "fold_angle", "sweep_wigner", "sweep_chsh", "region_of", "maximize_chsh", "trace_boundary",
    "export_atlas", "read_atlas",
]
