"""Strength functions kappa(alpha) and quadrature over the order interval [0, 1].

A distributed-order operator is a weighted superposition of constant-order
operators; the weight is a normalized strength function ``kappa(alpha)`` on
the closed order interval [0, 1].  This module owns the strength-function
catalogue (uniform, linear, beta, truncated normal, Dirac delta), the
trapezoidal discretization of the order interval, and the numeric moments
used to characterize each distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy import stats

__all__ = [
    "DiracDeltaError",
    "SingularIntegrandError",
    "Moments",
    "OrderDistribution",
    "uniform",
    "linear",
    "beta",
    "truncnorm",
    "dirac",
    "parse_distribution",
    "format_distribution",
]

#: grid resolution used for numeric moments (>= 1e4 points per contract)
_MOMENT_GRID = 100_001


class DiracDeltaError(ValueError):
    """A Dirac-delta distribution has no pointwise density."""


class SingularIntegrandError(ValueError):
    """The integrand of a distributed-order quadrature is non-finite at a node."""

    def __init__(self, alpha: float, value: float):
        self.alpha = alpha
        self.value = value
        super().__init__(f"singular integrand at order node alpha={alpha!r}: got {value!r}")


class Moments(NamedTuple):
    mean: float
    median: float
    mode: float | None
    std: float


@dataclass(frozen=True)
class OrderDistribution:
    """A normalized strength function with its order-interval quadrature.

    Parameters
    ----------
    kind:
        One of ``uniform``, ``linear``, ``beta``, ``truncnorm``, ``dirac``.
    params:
        Distribution parameters: ``beta`` takes ``(a, b)``, ``truncnorm``
        takes ``(loc, scale)`` of the parent Gaussian before truncation to
        [0, 1], ``dirac`` takes ``(alpha0,)``.  Continuous kinds follow the
        scipy.stats parameterization and are renormalized on [0, 1].
    n_alpha:
        Number of uniform subdivisions of [0, 1]; the quadrature uses the
        n_alpha + 1 closed trapezoid nodes.  Ignored by ``dirac``, which
        collapses every quadrature to a single constant-order evaluation.
    """

    kind: str
    params: tuple[float, ...] = ()
    n_alpha: int = 100
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("uniform", "linear", "beta", "truncnorm", "dirac"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.n_alpha < 1:
            raise ValueError("n_alpha must be >= 1")
        self._check_params()
        if self.kind == "dirac":
            nodes = np.array([self.params[0]])
            weights = np.array([1.0])
        else:
            nodes = np.linspace(0.0, 1.0, self.n_alpha + 1)
            weights = np.ones(self.n_alpha + 1)
            weights[0] = weights[-1] = 0.5
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def _check_params(self):
        k, p = self.kind, self.params
        if k == "beta":
            if len(p) != 2 or p[0] <= 0 or p[1] <= 0:
                raise ValueError("beta requires shape parameters a > 0, b > 0")
        elif k == "truncnorm":
            if len(p) != 2 or p[1] <= 0:
                raise ValueError("truncnorm requires (loc, scale) with scale > 0")
        elif k == "dirac":
            if len(p) != 1 or not 0.0 <= p[0] <= 1.0:
                raise ValueError("dirac requires a single order alpha0 in [0, 1]")
        elif p:
            raise ValueError(f"{k} takes no parameters")

    # -- density -----------------------------------------------------------

    @property
    def is_dirac(self) -> bool:
        return self.kind == "dirac"

    @property
    def delta_alpha(self) -> float:
        return 1.0 / self.n_alpha

    def evaluate(self, alpha) -> np.ndarray | float:
        """Density kappa(alpha) for alpha in [0, 1].

        Raises
        ------
        DiracDeltaError
            For the Dirac-delta kind, which has no pointwise density; use
            :meth:`distributed_quadrature`, which collapses via the sifting
            property instead.
        """
        if self.is_dirac:
            raise DiracDeltaError(
                "Dirac-delta strength function has no pointwise density; "
                "use the delta-collapse path in distributed_quadrature"
            )
        a = np.asarray(alpha, dtype=float)
        if np.any((a < 0.0) | (a > 1.0)):
            raise ValueError("order alpha must lie in [0, 1]")
        out = self._pdf(a)
        return float(out) if np.isscalar(alpha) else out

    def _pdf(self, a: np.ndarray) -> np.ndarray:
        if self.kind == "uniform":
            return np.ones_like(a)
        if self.kind == "linear":
            # forced by the reported central tendencies: mean 2/3, median
            # 1/sqrt(2), mode 1
            return 2.0 * a
        if self.kind == "beta":
            # scipy's incomplete-beta kernel overflows near the underflow
            # threshold; the density there is indistinguishable from its
            # endpoint value anyway
            a = np.where(np.abs(a) < 1e-100, 0.0, a)
            return stats.beta.pdf(a, self.params[0], self.params[1])
        # Gaussian truncated to [0, 1] and renormalized
        loc, scale = self.params
        lo, hi = (0.0 - loc) / scale, (1.0 - loc) / scale
        return stats.truncnorm.pdf(a, lo, hi, loc=loc, scale=scale)

    # -- quadrature ---------------------------------------------------------

    def weighted_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Order nodes alpha_r and combined coefficients w_r kappa(alpha_r) dalpha.

        For the Dirac-delta kind the single node carries coefficient 1, so
        that any weighted sum reduces to one constant-order evaluation.
        """
        if self.is_dirac:
            return self.nodes.copy(), np.array([1.0])
        coeff = self.weights * self._pdf(self.nodes) * self.delta_alpha
        return self.nodes.copy(), coeff

    def distributed_quadrature(self, f: Callable[[float], float]) -> float:
        """Integrate f against the strength function over [0, 1].

        Returns ``sum_r w_r kappa(alpha_r) f(alpha_r) dalpha`` on the closed
        trapezoid grid; for Dirac delta returns ``f(alpha0)`` exactly.
        ``f`` must be finite at every node, endpoints included.
        """
        if self.is_dirac:
            val = f(float(self.params[0]))
            if not np.all(np.isfinite(val)):
                raise SingularIntegrandError(float(self.params[0]), val)
            return val
        nodes, coeff = self.weighted_nodes()
        total = 0.0
        for alpha_r, c in zip(nodes, coeff):
            val = f(float(alpha_r))
            if not np.all(np.isfinite(val)):
                raise SingularIntegrandError(float(alpha_r), val)
            total = total + c * val
        return total

    # -- moments -------------------------------------------------------------

    def moments(self) -> Moments:
        """Numeric (mean, median, mode, std) of the strength function.

        Computed from the density on a fine closed grid; the Dirac delta
        returns its atom for every location measure and zero spread.  The
        mode is None when the density is flat (no unique maximizer).
        """
        if self.is_dirac:
            a0 = float(self.params[0])
            return Moments(a0, a0, a0, 0.0)
        grid = np.linspace(0.0, 1.0, _MOMENT_GRID)
        dens = self._pdf(grid)
        norm = np.trapezoid(dens, grid)
        mean = np.trapezoid(grid * dens, grid) / norm
        second = np.trapezoid(grid**2 * dens, grid) / norm
        std = math.sqrt(max(second - mean**2, 0.0))
        # median via inverse interpolation of the cumulative trapezoid
        cdf = np.concatenate(([0.0], np.cumsum((dens[1:] + dens[:-1]) / 2.0))) * (
            grid[1] - grid[0]
        )
        cdf /= cdf[-1]
        median = float(np.interp(0.5, cdf, grid))
        if np.ptp(dens) < 1e-12 * np.max(dens):
            mode = None
        else:
            mode = float(grid[int(np.argmax(dens))])
        return Moments(float(mean), median, mode, float(std))


# -- constructors ------------------------------------------------------------


def uniform(n_alpha: int = 100) -> OrderDistribution:
    return OrderDistribution("uniform", (), n_alpha)


def linear(n_alpha: int = 100) -> OrderDistribution:
    return OrderDistribution("linear", (), n_alpha)


def beta(a: float, b: float, n_alpha: int = 100) -> OrderDistribution:
    return OrderDistribution("beta", (float(a), float(b)), n_alpha)


def truncnorm(loc: float, scale: float, n_alpha: int = 100) -> OrderDistribution:
    return OrderDistribution("truncnorm", (float(loc), float(scale)), n_alpha)


def dirac(alpha0: float, n_alpha: int = 100) -> OrderDistribution:
    return OrderDistribution("dirac", (float(alpha0),), n_alpha)


# -- textual spec ("kind key=value ...") used by config files and the CLI ----

_PARAM_NAMES = {"beta": ("a", "b"), "truncnorm": ("loc", "scale"), "dirac": ("alpha",)}


def parse_distribution(spec: str, n_alpha: int = 100) -> OrderDistribution:
    """Parse a distribution spec like ``beta a=2 b=5`` or ``dirac alpha=0.7``."""
    tokens = spec.replace(",", " ").split()
    if not tokens:
        raise ValueError("empty distribution spec")
    kind = tokens[0].lower()
    given: dict[str, float] = {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ValueError(f"malformed distribution parameter {tok!r} (expected key=value)")
        key, _, val = tok.partition("=")
        try:
            given[key.strip()] = float(val)
        except ValueError:
            raise ValueError(f"non-numeric distribution parameter {tok!r}") from None
    names = _PARAM_NAMES.get(kind, ())
    if set(given) != set(names):
        expect = " ".join(names) if names else "none"
        raise ValueError(f"distribution {kind!r} expects parameters: {expect}")
    params = tuple(given[name] for name in names)
    return OrderDistribution(kind, params, n_alpha)


def format_distribution(dist: OrderDistribution) -> str:
    """Inverse of :func:`parse_distribution` (round-trips exactly)."""
    names = _PARAM_NAMES.get(dist.kind, ())
    parts = [dist.kind]
    parts += [f"{name}={value:.12g}" for name, value in zip(names, dist.params)]
    return " ".join(parts)
