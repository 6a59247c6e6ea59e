"""Shot-noise series simulation of Levy subordinators.

A subordinator is a non-negative, non-decreasing pure-jump Levy process.
On a bounded interval it is represented by a finite collection of
(position, magnitude) pairs: ordered jump magnitudes are produced by
passing the epochs of a Poisson process through the inverse tail mass of
the Levy density (or through a dominating process that is subsequently
thinned), and positions are drawn uniformly over the interval.  The
resulting step function

    W(x) = sum_i M_i * 1{V_i <= x}

is evaluated with the closed-on-the-right convention.

Supported families: tempered stable (density ``C x^{-1-alpha} e^{-beta x}``),
gamma (``C x^{-1} e^{-beta x}``) and the raw stable process
(``C x^{-1-alpha}``, i.e. tempered stable without the tempering step).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gamma as gamma_fn

TEMPERED_STABLE = "tempered_stable"
GAMMA = "gamma"
STABLE = "stable"

_FAMILIES = (TEMPERED_STABLE, GAMMA, STABLE)


@dataclass(frozen=True)
class LevyMeasureSpec:
    """Parameters of a subordinator family plus the series truncation budget.

    ``C`` scales the expected number of jumps per unit measure, ``alpha``
    is the stable tail index (unused for gamma), ``beta`` the exponential
    tempering rate (ignored for stable), and ``n_terms`` the fixed number
    of candidate terms generated per simulated series.
    """

    family: str
    C: float
    alpha: float = 0.5
    beta: float = 1.0
    n_terms: int = 1000

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown subordinator family {self.family!r}")
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if self.family in (TEMPERED_STABLE, STABLE) and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.family == GAMMA and not self.beta > 0:
            raise ValueError(f"beta must be positive for the gamma family, got {self.beta}")
        if self.family == TEMPERED_STABLE and self.beta < 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if self.n_terms < 1:
            raise ValueError(f"n_terms must be at least 1, got {self.n_terms}")


@dataclass(frozen=True)
class JumpSet:
    """Finite point set (positions, magnitudes) of a subordinator on an interval.

    Magnitudes are strictly positive and positions lie inside the closed
    domain.  Neither array is required to be sorted; they are kept in the
    order produced by simulation or by Gibbs edits.
    """

    positions: np.ndarray
    magnitudes: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        positions = np.atleast_1d(np.array(self.positions, dtype=float))
        magnitudes = np.atleast_1d(np.array(self.magnitudes, dtype=float))
        if positions.shape != magnitudes.shape or positions.ndim != 1:
            raise ValueError("positions and magnitudes must be 1-d arrays of equal length")
        lo, hi = float(self.domain[0]), float(self.domain[1])
        if not lo < hi:
            raise ValueError(f"degenerate domain ({lo}, {hi})")
        if magnitudes.size:
            if not np.all(magnitudes > 0):
                raise ValueError("all jump magnitudes must be strictly positive")
            if positions.min() < lo or positions.max() > hi:
                raise ValueError("jump positions must lie within the domain")
        positions.flags.writeable = False
        magnitudes.flags.writeable = False
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "magnitudes", magnitudes)
        object.__setattr__(self, "domain", (lo, hi))

    def __len__(self):
        return self.positions.size


class SubordinatorPath:
    """Evaluatable multi-dimensional subordinator built from per-dimension jump sets.

    Each input dimension carries an independent jump set; evaluation of
    dimension ``k`` at ``x`` sums the magnitudes of jumps with position
    ``<= x``.  Construction caches sorted positions and cumulative sums
    so evaluation is a binary search.  Instances are immutable.
    """

    def __init__(self, jump_sets: Sequence[JumpSet]):
        if len(jump_sets) < 1:
            raise ValueError("a path needs at least one dimension")
        self.jump_sets = tuple(jump_sets)
        self._sorted_pos = []
        self._cum_mags = []
        for js in self.jump_sets:
            order = np.argsort(js.positions, kind="stable")
            pos = js.positions[order]
            cum = np.concatenate(([0.0], np.cumsum(js.magnitudes[order])))
            pos.flags.writeable = False
            cum.flags.writeable = False
            self._sorted_pos.append(pos)
            self._cum_mags.append(cum)

    @property
    def ndim(self) -> int:
        return len(self.jump_sets)

    @property
    def domains(self) -> tuple[tuple[float, float], ...]:
        return tuple(js.domain for js in self.jump_sets)

    def values(self, x, dim: int = 0) -> np.ndarray:
        """Evaluate W(x) for dimension ``dim`` at the points ``x``.

        Points outside the closed domain raise ``ValueError``.
        """
        x = np.asarray(x, dtype=float)
        lo, hi = self.jump_sets[dim].domain
        if x.size and (x.min() < lo or x.max() > hi):
            bad = x[(x < lo) | (x > hi)]
            raise ValueError(
                f"points outside domain [{lo}, {hi}] in dimension {dim}: {bad[:5].tolist()}"
            )
        idx = np.searchsorted(self._sorted_pos[dim], x, side="right")
        return self._cum_mags[dim][idx]

    def value(self, x: float, dim: int = 0) -> float:
        return float(self.values(np.asarray([x]), dim)[0])

    def total(self, dim: int = 0) -> float:
        """Sum of all jump magnitudes in one dimension, i.e. W at the upper bound."""
        return float(self._cum_mags[dim][-1])

    def n_jumps(self) -> int:
        return int(sum(len(js) for js in self.jump_sets))


def empty_jump_set(domain: tuple[float, float]) -> JumpSet:
    return JumpSet(np.empty(0), np.empty(0), domain)


def poisson_epochs(rate: float, n_terms: int, rng: np.random.Generator) -> np.ndarray:
    """First ``n_terms`` epochs of a Poisson process with the given rate.

    Returns the strictly increasing cumulative sums of i.i.d. exponential
    inter-arrival times with mean ``1/rate``.
    """
    if not rate > 0:
        raise ValueError(f"rate must be positive, got {rate}")
    if n_terms < 1:
        raise ValueError(f"n_terms must be at least 1, got {n_terms}")
    return np.cumsum(rng.exponential(scale=1.0 / rate, size=n_terms))


def _stable_candidates(spec: LevyMeasureSpec, epochs: np.ndarray) -> np.ndarray:
    # Inverse tail mass of the stable density C x^{-1-alpha}: decreasing in the epoch.
    with np.errstate(over="ignore", under="ignore"):
        return (spec.alpha * epochs / spec.C) ** (-1.0 / spec.alpha)


def simulate_ts_jumps(spec: LevyMeasureSpec, region_measure: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Jump magnitudes of a tempered stable subordinator on a region.

    Candidates come from the dominating stable process (epochs at rate
    ``region_measure`` passed through the inverse stable tail mass) and are
    kept with probability ``exp(-beta * x)``.  The accepted magnitudes
    retain the decreasing candidate order.  Candidates that underflow to
    zero in float64 are dropped.
    """
    if spec.family != TEMPERED_STABLE:
        raise ValueError(f"expected a tempered stable spec, got {spec.family!r}")
    epochs = poisson_epochs(region_measure, spec.n_terms, rng)
    x = _stable_candidates(spec, epochs)
    u = rng.random(spec.n_terms)
    with np.errstate(over="ignore", under="ignore"):
        keep = u < np.exp(-spec.beta * x)
    x = x[keep]
    return x[x > 0]


def simulate_stable_jumps(spec: LevyMeasureSpec, region_measure: float,
                          rng: np.random.Generator) -> np.ndarray:
    """Jump magnitudes of a raw stable subordinator (no tempering).

    Consumes the same random variates as the tempered stable sampler so
    that ``beta = 0`` tempering reproduces this output bit for bit.
    """
    if spec.family != STABLE:
        raise ValueError(f"expected a stable spec, got {spec.family!r}")
    epochs = poisson_epochs(region_measure, spec.n_terms, rng)
    x = _stable_candidates(spec, epochs)
    rng.random(spec.n_terms)  # parallel draw to the tempering uniforms
    return x[x > 0]


def simulate_gamma_jumps(spec: LevyMeasureSpec, region_measure: float,
                         rng: np.random.Generator) -> np.ndarray:
    """Jump magnitudes of a gamma subordinator on a region.

    Uses dominating-process thinning: candidates
    ``x_i = 1 / (beta * (exp(epoch_i / C) - 1))`` are accepted with
    probability ``(1 + beta x) exp(-beta x)``.  Large epochs map to
    candidates that underflow to zero; those are dropped.
    """
    if spec.family != GAMMA:
        raise ValueError(f"expected a gamma spec, got {spec.family!r}")
    epochs = poisson_epochs(region_measure, spec.n_terms, rng)
    with np.errstate(over="ignore", under="ignore"):
        x = 1.0 / (spec.beta * np.expm1(epochs / spec.C))
        accept_prob = (1.0 + spec.beta * x) * np.exp(-spec.beta * x)
    u = rng.random(spec.n_terms)
    x = x[u < accept_prob]
    return x[x > 0]


def simulate_jumps(spec: LevyMeasureSpec, region_measure: float,
                   rng: np.random.Generator) -> np.ndarray:
    """Dispatch to the family-specific jump sampler."""
    if spec.family == TEMPERED_STABLE:
        return simulate_ts_jumps(spec, region_measure, rng)
    if spec.family == GAMMA:
        return simulate_gamma_jumps(spec, region_measure, rng)
    return simulate_stable_jumps(spec, region_measure, rng)


def assign_positions(magnitudes: np.ndarray, domain: tuple[float, float],
                     rng: np.random.Generator) -> JumpSet:
    """Pair each magnitude with an independent uniform position on the open domain."""
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ValueError(f"degenerate domain ({lo}, {hi})")
    magnitudes = np.asarray(magnitudes, dtype=float)
    positions = rng.uniform(lo, hi, size=magnitudes.size)
    return JumpSet(positions, magnitudes, (lo, hi))


def simulate_path(spec: LevyMeasureSpec, domains: Sequence[tuple[float, float]],
                  rng: np.random.Generator) -> SubordinatorPath:
    """Independent subordinator per dimension, epochs at rate = interval length."""
    jump_sets = []
    for lo, hi in domains:
        mags = simulate_jumps(spec, hi - lo, rng)
        jump_sets.append(assign_positions(mags, (lo, hi), rng))
    return SubordinatorPath(jump_sets)


def normalize_scale(alpha: float, beta: float, family: str) -> float:
    """Scale C that gives the subordinator unit mean over a unit-length domain.

    Tempered stable: mean per unit measure is ``C Gamma(1-alpha) beta^(alpha-1)``,
    so ``C = beta^(1-alpha) / Gamma(1-alpha)``.  Gamma: mean is ``C / beta``,
    so ``C = beta``.  The raw stable process has no finite mean.
    """
    if family == TEMPERED_STABLE:
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        if not beta > 0:
            raise ValueError("tempered stable mean normalization requires beta > 0")
        return beta ** (1.0 - alpha) / gamma_fn(1.0 - alpha)
    if family == GAMMA:
        if not beta > 0:
            raise ValueError(f"beta must be positive, got {beta}")
        return float(beta)
    raise ValueError(f"no finite-mean normalization for family {family!r}")
