"""Adaptive maxima checking with telescoped prefix bounds.

Each retained candidate carries the running sum of the per-segment
likelihood-ratio statistics accumulated strictly before it.  That sum plus
the candidate's own suffix statistic upper-bounds the maximum over all
earlier candidates, so under the null the check usually stops after
evaluating a single curve; the bound only ever skips work, it never changes
the threshold decision.
"""

from __future__ import annotations

from dataclasses import dataclass

from .families import Direction, FamilySpec, SuffStat
from .pruning import PruneState, m_unknown_raw


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one threshold check.

    ``changed`` implies ``stat >= threshold``; otherwise either the prefix
    bound certified the maximum below the threshold or every curve was
    evaluated below it.  ``bound_used`` is the last bound computed, on the
    doubled (LR) scale.
    """

    changed: bool
    tau_low: int | None
    t_now: int
    stat: float | None
    curves_evaluated: int
    bound_used: float


def m_between(
    spec: FamilySpec,
    theta0: float | None,
    prefix_i: SuffStat,
    prefix_j: SuffStat,
    direction: Direction,
) -> float:
    """Likelihood-ratio statistic for a change at tau_i with data ending at tau_j.

    Prefixes are cumulative stats at the two times (count == tau).  With a
    known pre-change parameter the pre-change terms cancel and this is the
    one-sided segment statistic; with it unknown both fits maximise over the
    pre-change parameter.  Always >= 0.
    """
    if not prefix_i.count < prefix_j.count:
        raise ValueError("m_between requires prefix_i strictly shorter than prefix_j")
    if theta0 is not None:
        seg = SuffStat(prefix_j.sum_g - prefix_i.sum_g, prefix_j.count - prefix_i.count)
        return spec.seg_lr_known(theta0, seg, direction)
    return m_unknown_raw(
        spec, prefix_i.count, prefix_i.sum_g, prefix_j.count, prefix_j.sum_g, direction.sign
    )


def attach_bounds(state: PruneState, spec: FamilySpec) -> None:
    """Set the prefix bound of the candidate appended by the latest update.

    Call once after every update.  The first candidate gets 0; a new
    candidate gets its predecessor's bound plus the statistic of the segment
    between them.  Candidates that merged away need nothing, and survivors
    keep their bounds (their prefix segments are frozen).
    """
    recs = state.records
    if not recs:
        return
    last = recs[-1]
    if last.tau != state.total_count - 1:
        return  # newest candidate merged away during the cascade
    if len(recs) == 1:
        last.m_bound = 0.0
        return
    prev = recs[-2]
    if state.theta0 is not None:
        m = spec.seg_lr_raw(
            state.alpha0,
            state.beta0,
            state.g0,
            last.cum_sum - prev.cum_sum,
            last.tau - prev.tau,
            state.sign,
        )
        state.counters.transcendental_calls += spec.transcendental_cost
    else:
        m = m_unknown_raw(spec, prev.tau, prev.cum_sum, last.tau, last.cum_sum, state.sign)
        state.counters.transcendental_calls += 3 * spec.transcendental_cost
    last.m_bound = prev.m_bound + m


def check(state: PruneState, spec: FamilySpec, threshold: float) -> CheckOutcome:
    """Decide whether the doubled statistic crosses ``threshold``.

    Walks candidates newest to oldest.  At each one, if twice (suffix stat +
    prefix bound) is below the threshold, every remaining candidate is
    certified below it and the walk stops; if twice the suffix stat itself
    reaches the threshold, that is a detection on [tau, now].
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    recs = state.records
    c = state.counters
    T = state.total_count
    St = state.total_sum
    sign = state.sign
    evals = 0
    bound2 = 0.0
    hit_tau: int | None = None
    hit_stat: float | None = None
    known = state.theta0 is not None
    pooled: float | None = None

    for r in reversed(recs):
        if known:
            m = spec.seg_lr_raw(state.alpha0, state.beta0, state.g0, St - r.cum_sum, T - r.tau, sign)
        else:
            if pooled is None:
                pooled = T * spec.conjugate(St / T)
            m = m_unknown_raw(spec, r.tau, r.cum_sum, T, St, sign, pooled)
        evals += 1
        bound2 = 2.0 * (m + r.m_bound)
        if bound2 < threshold:
            break
        if 2.0 * m >= threshold:
            hit_tau = r.tau
            hit_stat = 2.0 * m
            break

    c.curves_evaluated_sum += evals
    c.transcendental_calls += evals * spec.transcendental_cost * (1 if known else 2)
    if not known and pooled is not None:
        c.transcendental_calls += spec.transcendental_cost
    return CheckOutcome(
        changed=hit_tau is not None,
        tau_low=hit_tau,
        t_now=T,
        stat=hit_stat,
        curves_evaluated=evals,
        bound_used=bound2,
    )
