"""One-parameter exponential families and their closed-form quantities.

Each family is written as f(x | theta) = exp[a(theta) * g(x) - b(theta) + d(x)]
with a, b increasing on the parameter domain and g the sufficient statistic.
The d(x) term cancels in every likelihood ratio and is never evaluated.

Conventions fixed here:

* ``gauss_var`` is parametrized by the **variance** (not the standard
  deviation): a(theta) = -1/(2 theta), b(theta) = log(theta)/2, so the mean
  map mu(theta) = b'/a' is the identity and matches the x^2 statistic.
* ``gauss_mean`` uses b(theta) = theta^2 / 2, making f the exact unit-variance
  normal density.  Pruning and likelihood-ratio values are invariant under a
  joint rescaling of (a, b), so this choice is cosmetic.
* Boundary conventions: 0 * log 0 = 0 for the Poisson and Binomial conjugates;
  Gamma and gauss_var reject non-positive means with an explicit error because
  a zero mean of a positive statistic means degenerate data.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateSegmentError,
    MeanRangeError,
    ParamDomainError,
    SupportError,
)

_INF = float("inf")


class FamilyKind(enum.Enum):
    GAUSS_MEAN = "gauss-mean"
    GAUSS_VAR = "gauss-var"
    POISSON = "poisson"
    BINOMIAL = "binomial"
    GAMMA = "gamma"


class Direction(enum.Enum):
    """Side of the pre-change parameter on which the alternative lives."""

    UP = 1
    DOWN = -1

    @property
    def sign(self) -> int:
        return self.value


class SuffStat(NamedTuple):
    """Sufficient statistic of a segment: sum of g(x_t) and observation count."""

    sum_g: float
    count: int

    @property
    def mean(self) -> float:
        if self.count <= 0:
            raise ValueError("segment mean undefined for empty segment")
        return self.sum_g / self.count


@dataclass(frozen=True)
class FamilySpec:
    """A concrete one-parameter exponential family.

    ``trials`` is the per-observation trial count (binomial only) and
    ``shape`` the fixed shape parameter (gamma only); both are None
    elsewhere.  ``param_domain`` is the open interval of admissible theta.
    """

    kind: FamilyKind
    trials: int | None = None
    shape: float | None = None

    def __post_init__(self):
        if self.kind is FamilyKind.BINOMIAL:
            if self.trials is None or self.trials < 1:
                raise ValueError("binomial family requires trials >= 1")
            if self.shape is not None:
                raise ValueError("shape is a gamma-only parameter")
        elif self.kind is FamilyKind.GAMMA:
            if self.shape is None or not self.shape > 0:
                raise ValueError("gamma family requires shape > 0")
            if self.trials is not None:
                raise ValueError("trials is a binomial-only parameter")
        elif self.trials is not None or self.shape is not None:
            raise ValueError(f"{self.kind.value} takes no extra parameters")

    # -- constructors -------------------------------------------------

    @classmethod
    def gauss_mean(cls) -> "FamilySpec":
        return cls(FamilyKind.GAUSS_MEAN)

    @classmethod
    def gauss_var(cls) -> "FamilySpec":
        return cls(FamilyKind.GAUSS_VAR)

    @classmethod
    def poisson(cls) -> "FamilySpec":
        return cls(FamilyKind.POISSON)

    @classmethod
    def binomial(cls, trials: int) -> "FamilySpec":
        return cls(FamilyKind.BINOMIAL, trials=trials)

    @classmethod
    def gamma(cls, shape: float) -> "FamilySpec":
        return cls(FamilyKind.GAMMA, shape=shape)

    # -- parameter domain ---------------------------------------------

    @property
    def param_domain(self) -> tuple[float, float]:
        if self.kind is FamilyKind.GAUSS_MEAN:
            return (-_INF, _INF)
        if self.kind is FamilyKind.BINOMIAL:
            return (0.0, 1.0)
        return (0.0, _INF)

    def in_domain(self, theta: float) -> bool:
        lo, hi = self.param_domain
        return lo < theta < hi and math.isfinite(theta)

    def _require_domain(self, theta: float) -> None:
        if not self.in_domain(theta):
            lo, hi = self.param_domain
            raise ParamDomainError(
                f"theta={theta!r} outside parameter domain ({lo}, {hi}) "
                f"of {self.kind.value}"
            )

    # -- Table-of-forms quantities ------------------------------------

    def alpha(self, theta: float) -> float:
        """Natural-parameter map a(theta)."""
        self._require_domain(theta)
        k = self.kind
        if k is FamilyKind.GAUSS_MEAN:
            return theta
        if k is FamilyKind.GAUSS_VAR:
            return -1.0 / (2.0 * theta)
        if k is FamilyKind.POISSON:
            return math.log(theta)
        if k is FamilyKind.BINOMIAL:
            return math.log(theta / (1.0 - theta))
        return -1.0 / theta  # gamma

    def beta_fn(self, theta: float) -> float:
        """Log-normalizer b(theta), normalized so f is a proper density."""
        self._require_domain(theta)
        k = self.kind
        if k is FamilyKind.GAUSS_MEAN:
            return theta * theta / 2.0
        if k is FamilyKind.GAUSS_VAR:
            return 0.5 * math.log(theta)
        if k is FamilyKind.POISSON:
            return theta
        if k is FamilyKind.BINOMIAL:
            return -self.trials * math.log(1.0 - theta)
        return self.shape * math.log(theta)  # gamma

    def suff(self, x: float) -> float:
        """Sufficient statistic g(x); validates data support."""
        k = self.kind
        if k is FamilyKind.GAUSS_VAR:
            if not math.isfinite(x):
                raise SupportError(f"non-finite observation {x!r}")
            return x * x
        if k is FamilyKind.GAUSS_MEAN:
            if not math.isfinite(x):
                raise SupportError(f"non-finite observation {x!r}")
            return x
        if k is FamilyKind.POISSON:
            if x < 0 or x != math.floor(x) or not math.isfinite(x):
                raise SupportError(f"Poisson observation must be a non-negative integer, got {x!r}")
            return x
        if k is FamilyKind.BINOMIAL:
            if x < 0 or x > self.trials or x != math.floor(x) or not math.isfinite(x):
                raise SupportError(
                    f"Binomial observation must be an integer in [0, {self.trials}], got {x!r}"
                )
            return x
        # gamma
        if not (x > 0) or not math.isfinite(x):
            raise SupportError(f"Gamma observation must be positive, got {x!r}")
        return x

    def mean_suff(self, theta: float) -> float:
        """Mean map mu(theta) = b'(theta) / a'(theta); strictly increasing."""
        self._require_domain(theta)
        k = self.kind
        if k is FamilyKind.BINOMIAL:
            return self.trials * theta
        if k is FamilyKind.GAMMA:
            return self.shape * theta
        return theta  # gauss_mean, gauss_var, poisson

    def alpha_prime(self, theta: float) -> float:
        self._require_domain(theta)
        k = self.kind
        if k is FamilyKind.GAUSS_MEAN:
            return 1.0
        if k is FamilyKind.GAUSS_VAR:
            return 1.0 / (2.0 * theta * theta)
        if k is FamilyKind.POISSON:
            return 1.0 / theta
        if k is FamilyKind.BINOMIAL:
            return 1.0 / (theta * (1.0 - theta))
        return 1.0 / (theta * theta)  # gamma

    def beta_prime(self, theta: float) -> float:
        self._require_domain(theta)
        k = self.kind
        if k is FamilyKind.GAUSS_MEAN:
            return theta
        if k is FamilyKind.GAUSS_VAR:
            return 0.5 / theta
        if k is FamilyKind.POISSON:
            return 1.0
        if k is FamilyKind.BINOMIAL:
            return self.trials / (1.0 - theta)
        return self.shape / theta  # gamma

    @property
    def transcendental_cost(self) -> int:
        """log calls per curve or conjugate evaluation (portable cost proxy)."""
        if self.kind is FamilyKind.GAUSS_MEAN:
            return 0
        if self.kind is FamilyKind.BINOMIAL:
            return 2
        return 1

    def mle(self, gbar: float) -> float:
        """Inverse of the mean map.  Boundary means map to domain boundaries."""
        k = self.kind
        if k is FamilyKind.GAUSS_MEAN:
            return gbar
        if k is FamilyKind.BINOMIAL:
            if gbar < 0 or gbar > self.trials:
                raise MeanRangeError(f"gbar={gbar!r} outside [0, {self.trials}]")
            return gbar / self.trials
        if gbar < 0:
            raise MeanRangeError(f"gbar={gbar!r} outside [0, inf) for {k.value}")
        if k is FamilyKind.GAMMA:
            return gbar / self.shape
        return gbar  # gauss_var, poisson

    def conjugate(self, gbar: float) -> float:
        """Per-observation maximized log-likelihood A(g) = sup_theta [a(theta) g - b(theta)]."""
        k = self.kind
        if k is FamilyKind.GAUSS_MEAN:
            return gbar * gbar / 2.0
        if k is FamilyKind.POISSON:
            if gbar < 0:
                raise MeanRangeError(f"gbar={gbar!r} negative for poisson")
            if gbar == 0.0:
                return 0.0
            return gbar * math.log(gbar) - gbar
        if k is FamilyKind.BINOMIAL:
            n = self.trials
            if gbar < 0 or gbar > n:
                raise MeanRangeError(f"gbar={gbar!r} outside [0, {n}]")
            if gbar == 0.0 or gbar == n:
                return 0.0
            return gbar * math.log(gbar / (n - gbar)) + n * math.log((n - gbar) / n)
        # gamma and gauss_var need strictly positive means
        if not gbar > 0:
            raise DegenerateSegmentError(
                f"segment mean {gbar!r} is not positive; degenerate for {k.value}"
            )
        if k is FamilyKind.GAUSS_VAR:
            return -0.5 * (1.0 + math.log(gbar))
        kk = self.shape
        return -kk - kk * math.log(gbar / kk)  # gamma

    # -- directional segment likelihood ratio -------------------------

    def seg_lr_known(self, theta0: float, stat: SuffStat, direction: Direction) -> float:
        """Max log-likelihood-ratio of a one-sided change on a segment, theta0 known.

        Returns sup over theta1 strictly on the ``direction`` side of theta0 of
        n * [(a(t1) - a(t0)) gbar - (b(t1) - b(t0))], which is
        n * [A(gbar) - (a(t0) gbar - b(t0))] when gbar lies past mu(theta0)
        in that direction and 0 otherwise.  Never negative.
        """
        if stat.count <= 0:
            raise ValueError("seg_lr_known requires a non-empty segment")
        a0 = self.alpha(theta0)
        b0 = self.beta_fn(theta0)
        g0 = self.mean_suff(theta0)
        return self.seg_lr_raw(a0, b0, g0, stat.sum_g, stat.count, direction.sign)

    def seg_lr_raw(
        self, alpha0: float, beta0: float, g0: float, sum_g: float, count: int, sign: int
    ) -> float:
        # hot-path variant: alpha0/beta0/g0 precomputed by the caller
        gbar = sum_g / count
        if (gbar - g0) * sign <= 0:
            return 0.0
        m = count * (self.conjugate(gbar) - (alpha0 * gbar - beta0))
        return m if m > 0.0 else 0.0  # the gap is a divergence; clip rounding noise

    def validate_monotone(self, theta0: float, probe_grid: Sequence[float]) -> bool:
        """True iff t -> (b(t)-b(t0)) / (a(t)-a(t0)) strictly increases on the grid.

        Diagnostic startup check for the mean-comparison pruning rule; the grid
        must be sorted, inside the domain, and exclude theta0.
        """
        self._require_domain(theta0)
        a0 = self.alpha(theta0)
        b0 = self.beta_fn(theta0)
        prev = -_INF
        for t in probe_grid:
            ratio = (self.beta_fn(t) - b0) / (self.alpha(t) - a0)
            if ratio <= prev:
                return False
            prev = ratio
        return True

    def suff_arr(self, x: np.ndarray) -> np.ndarray:
        """Vectorized `suff` with the same support validation."""
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise SupportError("non-finite observation in stream")
        k = self.kind
        if k is FamilyKind.GAUSS_VAR:
            return x * x
        if k is FamilyKind.GAUSS_MEAN:
            return x
        if k is FamilyKind.POISSON:
            if np.any((x < 0) | (x != np.floor(x))):
                raise SupportError("Poisson observations must be non-negative integers")
            return x
        if k is FamilyKind.BINOMIAL:
            if np.any((x < 0) | (x > self.trials) | (x != np.floor(x))):
                raise SupportError(f"Binomial observations must be integers in [0, {self.trials}]")
            return x
        if np.any(x <= 0):
            raise SupportError("Gamma observations must be positive")
        return x

    # -- vectorized conjugate (oracle and grid search support) --------

    def conjugate_arr(self, g: np.ndarray) -> np.ndarray:
        """Elementwise A(g) on an array, same boundary conventions as `conjugate`."""
        g = np.asarray(g, dtype=float)
        k = self.kind
        if k is FamilyKind.GAUSS_MEAN:
            return g * g / 2.0
        if k is FamilyKind.POISSON:
            if np.any(g < 0):
                raise MeanRangeError("negative mean for poisson")
            safe = np.where(g > 0, g, 1.0)
            return np.where(g > 0, g * np.log(safe) - g, 0.0)
        if k is FamilyKind.BINOMIAL:
            n = self.trials
            if np.any((g < 0) | (g > n)):
                raise MeanRangeError(f"mean outside [0, {n}] for binomial")
            inner = (g > 0) & (g < n)
            gs = np.where(inner, g, 0.5 * n)
            val = gs * np.log(gs / (n - gs)) + n * np.log((n - gs) / n)
            return np.where(inner, val, 0.0)
        if np.any(g <= 0):
            raise DegenerateSegmentError(f"non-positive mean for {k.value}")
        if k is FamilyKind.GAUSS_VAR:
            return -0.5 * (1.0 + np.log(g))
        kk = self.shape
        return -kk - kk * np.log(g / kk)


def default_probe_grid(spec: FamilySpec, theta0: float) -> list[float]:
    """A small sorted grid around theta0 for `validate_monotone`."""
    kind = spec.kind
    if kind is FamilyKind.GAUSS_MEAN:
        offsets = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
        grid = [theta0 + o for o in offsets]
    elif kind is FamilyKind.BINOMIAL:
        grid = [theta0 * f for f in (0.25, 0.5, 0.8)]
        grid += [theta0 + (1.0 - theta0) * f for f in (0.2, 0.5, 0.75)]
    else:
        grid = [theta0 * f for f in (0.25, 0.5, 0.8, 1.25, 2.0, 4.0)]
    return sorted(t for t in grid if spec.in_domain(t) and t != theta0)
