"""Streaming detector orchestrating one or two directional pruning states."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InsufficientDataError, SupportError
from .families import Direction, FamilySpec, default_probe_grid
from .maxima import attach_bounds, check
from .pruning import PruneState, new_state, q_full, update

_DIRECTIONS = {"up": (Direction.UP,), "down": (Direction.DOWN,), "both": (Direction.UP, Direction.DOWN)}


@dataclass(frozen=True)
class DetectorConfig:
    """Run configuration.

    ``theta0`` is the known pre-change parameter, or None to maximise it out.
    ``threshold`` is on the doubled (LR) scale.  ``stat_every`` emits the full
    statistic every k steps (0 = never).
    """

    spec: FamilySpec
    theta0: float | None
    threshold: float
    direction: str = "both"
    stat_every: int = 0
    stop_on_detect: bool = True

    def __post_init__(self):
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"direction must be one of {sorted(_DIRECTIONS)}, got {self.direction!r}")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.stat_every < 0:
            raise ValueError("stat_every must be non-negative")
        if self.theta0 is not None and not self.spec.in_domain(self.theta0):
            lo, hi = self.spec.param_domain
            raise ValueError(f"theta0={self.theta0!r} outside parameter domain ({lo}, {hi})")


@dataclass(frozen=True)
class Detection:
    t_detect: int
    tau_low: int
    stat: float
    direction_hit: Direction


@dataclass(frozen=True)
class StepResult:
    t: int
    detection: Detection | None
    stat: float | None
    curves_stored: int
    curves_evaluated: int


class Detector:
    """One detector = one stream.  Feed observations with `step`.

    After a detection with ``stop_on_detect`` false the state continues
    unchanged; restart policy is the caller's concern.
    """

    def __init__(self, config: DetectorConfig):
        self.config = config
        spec = config.spec
        if config.theta0 is not None:
            grid = default_probe_grid(spec, config.theta0)
            if not spec.validate_monotone(config.theta0, grid):
                raise ValueError(
                    "the pruning comparator's monotonicity requirement fails "
                    f"for theta0={config.theta0!r}; check the parametrization"
                )
        self.states: list[PruneState] = [
            new_state(d, config.theta0, spec) for d in _DIRECTIONS[config.direction]
        ]
        self._t = 0

    @property
    def t(self) -> int:
        return self._t

    def step(self, x: float) -> StepResult:
        """Process one observation; returns counters and any detection."""
        cfg = self.config
        spec = cfg.spec
        try:
            g = spec.suff(x)
        except SupportError as e:
            raise SupportError(f"stream position {self._t + 1}: {e}") from e
        self._t += 1
        detection = None
        evals = 0
        for st in self.states:
            update(st, g)
            attach_bounds(st, spec)
        # with the pre-change parameter unknown the statistic needs at least
        # one point on each side of a split, so T < 2 can never detect
        if cfg.theta0 is not None or self._t >= 2:
            for st in self.states:
                out = check(st, spec, cfg.threshold)
                evals += out.curves_evaluated
                if out.changed and (detection is None or out.stat > detection.stat):
                    detection = Detection(
                        t_detect=self._t,
                        tau_low=out.tau_low,
                        stat=out.stat,
                        direction_hit=st.direction,
                    )
        stat = None
        if cfg.stat_every and self._t % cfg.stat_every == 0 and self._stat_defined():
            stat = self.statistic()
        return StepResult(
            t=self._t,
            detection=detection,
            stat=stat,
            curves_stored=sum(len(st.records) for st in self.states),
            curves_evaluated=evals,
        )

    def _stat_defined(self) -> bool:
        need = 1 if self.config.theta0 is not None else 2
        return self._t >= need

    def statistic(self) -> float:
        """Current doubled statistic; forces full evaluation of every curve."""
        if not self._stat_defined():
            need = 1 if self.config.theta0 is not None else 2
            raise InsufficientDataError(f"statistic undefined before {need} observations")
        return 2.0 * max(q_full(st, self.config.spec)[0] for st in self.states)


def new_detector(config: DetectorConfig) -> Detector:
    return Detector(config)
