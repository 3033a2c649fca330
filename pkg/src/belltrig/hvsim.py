"""Local hidden-variable models and a quantum-rule sampler for singlet pairs.

Wigner's model
--------------
Each particle carries preset outcomes along three directions.  Nine
measurement pairs with four relative results each give ``4**9`` raw outcome
tables; once a particle's outcome is assumed independent of the distant
apparatus, only the six presets matter, leaving ``2**6 = 64`` possibility
domains.  A :class:`DomainDistribution` is a probability vector over them.

CHSH model
----------
Each pair carries signs ``v(a), v(d)`` for particle 1 and ``w(b), w(c)`` for
particle 2.  Every one of the 16 assignments gives
``|v_a (w_b + w_c) + v_d (w_b - w_c)| = 2``, so averages obey ``|S| <= 2``.

Singlet sampler
---------------
Outcomes ``(++, --, +-, -+)`` are drawn with probabilities
``(s, s, c, c)/2`` where ``s = sin^2(theta/2)`` and ``c = cos^2(theta/2)``.
Draws are split into fixed-size blocks, each with its own Philox stream
keyed by ``(seed, block)``, so counts do not depend on the worker count.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DomainError, tolerances

SIGNS = (1, -1)
OUTCOMES = ("++", "--", "+-", "-+")
BLOCK_SIZE = 1 << 18
_SEED_MASK = (1 << 64) - 1


def _sign(name: str, s: int) -> int:
    if s not in SIGNS:
        raise DomainError(f"{name} must be +1 or -1, got {s!r}")
    return int(s)


def _fmt(s: int) -> str:
    return "+" if s > 0 else "-"


@dataclass(frozen=True)
class LhvDomain:
    particle1: tuple[int, int, int]
    particle2: tuple[int, int, int]

    def __post_init__(self) -> None:
        for name in ("particle1", "particle2"):
            signs = tuple(getattr(self, name))
            if len(signs) != 3:
                raise DomainError(f"{name} needs exactly three signs, got {len(signs)}")
            object.__setattr__(self, name, tuple(_sign(name, s) for s in signs))

    @property
    def index(self) -> int:
        """Position in canonical order: particle 1 high bits, ``+`` before ``-``."""
        bits = [0 if s > 0 else 1 for s in self.particle1 + self.particle2]
        return int("".join(map(str, bits)), 2)

    @property
    def anticorrelated(self) -> bool:
        return all(p == -q for p, q in zip(self.particle1, self.particle2))

    @classmethod
    def parse(cls, text: str) -> "LhvDomain":
        """Read ``"(+,-,-; -,+,-)"``-style text."""
        cleaned = text.strip().strip("()").replace(" ", "")
        try:
            left, right = cleaned.split(";")
            p1 = tuple(1 if t == "+" else -1 if t in ("-", "−") else None for t in left.split(","))
            p2 = tuple(1 if t == "+" else -1 if t in ("-", "−") else None for t in right.split(","))
        except ValueError:
            raise DomainError(f"cannot parse domain {text!r}") from None
        if None in p1 or None in p2:
            raise DomainError(f"cannot parse domain {text!r}")
        return cls(p1, p2)  # type: ignore[arg-type]

    def __str__(self) -> str:
        return f"({','.join(map(_fmt, self.particle1))}; {','.join(map(_fmt, self.particle2))})"


def enumerate_domains(anticorrelated: bool = False) -> list[LhvDomain]:
    """All 64 domains in canonical order, or the 8 with ``particle2 = -particle1``."""
    out = [LhvDomain(s[:3], s[3:]) for s in itertools.product(SIGNS, repeat=6)]
    if anticorrelated:
        out = [d for d in out if d.anticorrelated]
    return out


_DOMAINS = enumerate_domains()
_PRESETS = np.array([d.particle1 + d.particle2 for d in _DOMAINS], dtype=np.int8)  # (64, 6)


@dataclass(frozen=True, eq=False)
class DomainDistribution:
    """Probability weights over the 64 canonical domains."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float)
        if w.shape != (64,):
            raise DomainError(f"a domain distribution needs 64 weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise DomainError("domain weights must be finite and nonnegative")
        total = math.fsum(w)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"domain weights must sum to 1, got {total!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls) -> "DomainDistribution":
        return cls(np.full(64, 1.0 / 64.0))

    @classmethod
    def point_mass(cls, domain: LhvDomain) -> "DomainDistribution":
        w = np.zeros(64)
        w[domain.index] = 1.0
        return cls(w)

    @classmethod
    def mixture(cls, domains: Sequence[LhvDomain], weights: Sequence[float]) -> "DomainDistribution":
        if len(domains) != len(weights):
            raise DomainError("domains and weights differ in length")
        w = np.zeros(64)
        for d, p in zip(domains, weights):
            w[d.index] += p
        return cls(w)

    @classmethod
    def random(
        cls, seed: int | np.random.Generator = 0, support: Sequence[LhvDomain] | None = None
    ) -> "DomainDistribution":
        """Flat-Dirichlet weights over ``support`` (all 64 domains by default)."""
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(int(seed) & _SEED_MASK)
        support = _DOMAINS if support is None else list(support)
        p = rng.dirichlet(np.ones(len(support)))
        return cls.mixture(support, p / math.fsum(p))


def _direction(name: str, i: int) -> int:
    if i not in (1, 2, 3):
        raise DomainError(f"{name} must be a direction index in {{1, 2, 3}}, got {i!r}")
    return i - 1


def lhv_joint_probability(dist: DomainDistribution, constraints: Mapping[tuple[int, int], int]) -> float:
    """Total weight of domains matching every ``(particle, direction) -> sign``.

    ``particle`` is 1 or 2 and ``direction`` 1, 2 or 3.
    """
    mask = np.ones(64, dtype=bool)
    for (particle, direction), sign in constraints.items():
        if particle not in (1, 2):
            raise DomainError(f"particle must be 1 or 2, got {particle!r}")
        col = 3 * (particle - 1) + _direction("direction", direction)
        mask &= _PRESETS[:, col] == _sign("sign", sign)
    return math.fsum(dist.weights[mask])


def lhv_pair_probability(dist: DomainDistribution, i: int, k: int, s1: int, s2: int) -> float:
    """Probability that particle 1 reads ``s1`` along direction ``i`` and
    particle 2 reads ``s2`` along direction ``k``."""
    _direction("i", i)
    _direction("k", k)
    return lhv_joint_probability(dist, {(1, i): s1, (2, k): s2})


@dataclass(frozen=True)
class LhvWignerReport:
    lhs: float
    rhs: float
    slack: float
    satisfied: bool


def lhv_wigner_check(dist: DomainDistribution) -> LhvWignerReport:
    """Evaluate ``P12 + P23 >= P13`` on a domain distribution.

    ``Pik`` is the probability that both particle 1 along ``w_i`` and
    particle 2 along ``w_k`` read ``+``, the event whose quantum probability
    is ``1/2 sin^2(theta_ik / 2)``.

    The bound holds for every distribution supported on anticorrelated
    domains (``particle2 = -particle1``).  Without that constraint it fails
    on the four point masses ``(+,-,*; *,-,+)``: Wigner's derivation needs the
    particle-2 reading along ``w_2`` to reveal particle 1's preset there.
    """
    p12 = lhv_pair_probability(dist, 1, 2, 1, 1)
    p23 = lhv_pair_probability(dist, 2, 3, 1, 1)
    p13 = lhv_pair_probability(dist, 1, 3, 1, 1)
    lhs = p12 + p23
    slack = lhs - p13
    return LhvWignerReport(lhs, p13, slack, slack >= -tolerances().feasibility)


# -- CHSH assignments ---------------------------------------------------------


@dataclass(frozen=True)
class ChshAssignment:
    v_a: int
    v_d: int
    w_b: int
    w_c: int

    def __post_init__(self) -> None:
        for name in ("v_a", "v_d", "w_b", "w_c"):
            object.__setattr__(self, name, _sign(name, getattr(self, name)))

    def __str__(self) -> str:
        return "(" + ",".join(_fmt(s) for s in (self.v_a, self.v_d, self.w_b, self.w_c)) + ")"


def enumerate_assignments() -> list[ChshAssignment]:
    return [ChshAssignment(*s) for s in itertools.product(SIGNS, repeat=4)]


def chsh_term(assign: ChshAssignment) -> int:
    """``|v_a (w_b + w_c) + v_d (w_b - w_c)|``; always 2."""
    return abs(assign.v_a * (assign.w_b + assign.w_c) + assign.v_d * (assign.w_b - assign.w_c))


@dataclass(frozen=True)
class LhvCorrelation:
    e_ab: float
    e_ac: float
    e_db: float
    e_dc: float
    chsh_value: float


def lhv_correlation(assignments: Iterable[ChshAssignment]) -> LhvCorrelation:
    """Empirical averages ``E(x, y) = (1/N) sum v_i(x) w_i(y)``.

    Sums are accumulated as integers, so ``chsh_value <= 2`` holds exactly.
    """
    arr = np.array([(s.v_a, s.v_d, s.w_b, s.w_c) for s in assignments], dtype=np.int64)
    if arr.size == 0:
        raise DomainError("lhv_correlation needs at least one assignment")
    n = arr.shape[0]
    va, vd, wb, wc = arr.T
    ab, ac, db, dc = (int(np.sum(x * y)) for x, y in ((va, wb), (va, wc), (vd, wb), (vd, wc)))
    return LhvCorrelation(ab / n, ac / n, db / n, dc / n, abs(ab + ac + db - dc) / n)


# -- singlet sampling ---------------------------------------------------------


def singlet_probabilities(theta: float) -> np.ndarray:
    """``[P(++), P(--), P(+-), P(-+)]`` for directions at angle ``theta``."""
    same = 0.5 * math.sin(theta / 2.0) ** 2
    diff = 0.5 * math.cos(theta / 2.0) ** 2
    return np.array([same, same, diff, diff])


@dataclass(frozen=True)
class SingletSampleBatch:
    theta: float
    n: int
    counts: tuple[int, int, int, int]
    seed: int

    def count(self, outcome: str) -> int:
        return self.counts[OUTCOMES.index(outcome)]

    def to_dict(self) -> dict:
        est = estimate_correlation(self) if self.n >= 2 else None
        return {
            "theta": self.theta,
            "n": self.n,
            "seed": self.seed,
            "counts": dict(zip(OUTCOMES, self.counts)),
            "e_hat": None if est is None else est.e_hat,
            "std_err": None if est is None else est.std_err,
        }


def _block_counts(cdf: np.ndarray, seed: int, block: int, size: int) -> np.ndarray:
    ss = np.random.SeedSequence([seed & _SEED_MASK, block])
    u = np.random.Generator(np.random.Philox(ss)).random(size)
    idx = np.searchsorted(cdf, u, side="right")
    return np.bincount(idx, minlength=4)[:4]


def sample_singlet(theta: float, n: int, seed: int = 0, workers: int = 1) -> SingletSampleBatch:
    """Draw ``n`` singlet outcome pairs at relative angle ``theta`` by inverse CDF.

    An outcome with zero probability has an empty CDF interval and is never
    drawn, so ``theta = 0`` yields no ``++``/``--`` and ``theta = pi`` no
    ``+-``/``-+``.
    """
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta={theta!r} is outside [0, pi]")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    cdf = np.cumsum(singlet_probabilities(theta))
    cdf[-1] = 1.0
    sizes = [BLOCK_SIZE] * (n // BLOCK_SIZE)
    if n % BLOCK_SIZE:
        sizes.append(n % BLOCK_SIZE)
    jobs = list(enumerate(sizes))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _block_counts(cdf, seed, j[0], j[1]), jobs))
    else:
        parts = [_block_counts(cdf, seed, b, s) for b, s in jobs]
    counts = np.sum(parts, axis=0)
    return SingletSampleBatch(float(theta), int(n), tuple(int(c) for c in counts), int(seed))


@dataclass(frozen=True)
class CorrelationEstimate:
    e_hat: float
    std_err: float


def estimate_correlation(batch: SingletSampleBatch) -> CorrelationEstimate:
    """``e_hat = (N++ + N-- - N+- - N-+)/n`` with ``std_err = sqrt((1 - e_hat^2)/n)``."""
    if batch.n < 2:
        raise DomainError("estimate_correlation needs n >= 2")
    pp, mm, pm, mp = batch.counts
    e_hat = (pp + mm - pm - mp) / batch.n
    return CorrelationEstimate(e_hat, math.sqrt(max(0.0, 1.0 - e_hat * e_hat) / batch.n))
