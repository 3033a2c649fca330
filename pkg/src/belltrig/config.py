"""Numerical tolerances shared by every module, plus the domain error type.

Tolerances live in a context variable so a caller (or the CLI) can override
them for a block of code without touching global state seen by other threads.
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass
from typing import Iterator


class DomainError(ValueError):
    """Raised when an input violates a mathematical precondition."""


@dataclass(frozen=True)
class Tolerances:
    # Gram determinant / inequality verdicts
    feasibility: float = 1e-12
    # non-unit rejection in angle_between and triangle slack
    angle: float = 1e-9
    # unit-norm invariant for stored configurations
    unit: float = 1e-12
    # CHSH inequality-equality identity residual
    identity: float = 1e-9
    # region thresholds at 2 and 2*sqrt(2)
    region: float = 1e-12
    # sin^2 + cos^2 = 1
    minmax: float = 1e-8
    # accretivity and the sin/cos comparison
    accretive: float = 1e-10
    # Gram matrix eigenvalue floor
    psd: float = 1e-10


_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "belltrig_tolerances", default=Tolerances()
)

TOLERANCE_NAMES = tuple(f.name for f in dataclasses.fields(Tolerances))


def tolerances() -> Tolerances:
    """Return the tolerances active in the current context."""
    return _current.get()


@contextlib.contextmanager
def override_tolerances(**values: float) -> Iterator[Tolerances]:
    """Temporarily replace named tolerances.

    Unknown names raise ``KeyError`` immediately, before anything changes.
    """
    unknown = set(values) - set(TOLERANCE_NAMES)
    if unknown:
        raise KeyError(f"unknown tolerance name(s): {', '.join(sorted(unknown))}")
    for name, value in values.items():
        if not value >= 0:
            raise ValueError(f"tolerance {name} must be nonnegative, got {value!r}")
    new = dataclasses.replace(_current.get(), **{k: float(v) for k, v in values.items()})
    token = _current.set(new)
    try:
        yield new
    finally:
        _current.reset(token)
