"""Beta priors and BetaBuster-style elicitation.

A prior statement has the form "the most likely value is ``mode`` and there is
probability ``tail_mass`` that the parameter exceeds ``threshold``".  For a
fixed mode the Beta family is indexed by its concentration ``s = a + b``, and
the tail probability at a threshold is monotone in ``s``, so the statement is
solved by bracketing followed by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ElicitationError

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAXIT = 200_000

_S_MAX = 1e7


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0) or math.isinf(self.a) or math.isinf(self.b):
            raise ValueError(f"Beta shape parameters must be positive and finite, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def mode(self) -> float | None:
        """Mode of the density, defined only for ``a > 1`` and ``b > 1``."""
        if self.a > 1 and self.b > 1:
            return (self.a - 1) / (self.a + self.b - 2)
        return None

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b}


UNIFORM = BetaParams(1.0, 1.0)


@dataclass(frozen=True)
class PriorSet:
    """Beta priors for the four accuracy rates and one or two prevalences."""

    se_a: BetaParams = UNIFORM
    sp_a: BetaParams = UNIFORM
    se_b: BetaParams = UNIFORM
    sp_b: BetaParams = UNIFORM
    prevalence_priors: tuple[BetaParams, ...] = field(default=(UNIFORM,))

    def __post_init__(self):
        object.__setattr__(self, "prevalence_priors", tuple(self.prevalence_priors))
        if len(self.prevalence_priors) not in (1, 2):
            raise ValueError("prevalence_priors must hold one or two Beta priors")

    @property
    def n_datasets(self) -> int:
        return len(self.prevalence_priors)

    def as_list(self) -> list[BetaParams]:
        """Priors in parameter order: Se_A, Sp_A, Se_B, Sp_B, then prevalences."""
        return [self.se_a, self.sp_a, self.se_b, self.sp_b, *self.prevalence_priors]

    @classmethod
    def uniform(cls, n_datasets: int = 1) -> "PriorSet":
        return cls(prevalence_priors=(UNIFORM,) * n_datasets)


def _betacf(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete beta continued fraction.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((qap + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}")


def _lower_regularized(a: float, b: float, x: float) -> float:
    """I_x(a, b) for x strictly inside (0, 1), assuming x < (a + 1) / (a + b + 2)."""
    log_front = a * math.log(x) + b * math.log1p(-x) - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    return math.exp(log_front) * _betacf(a, b, x) / a


def beta_tail(params: BetaParams, x: float) -> float:
    """P(X > x) for X ~ Beta(a, b).

    The regularized incomplete beta function is evaluated by continued
    fraction on whichever side of the distribution converges quickly, so
    the upper tail is computed directly rather than as ``1 - cdf``.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 1.0
    if x == 1.0:
        return 0.0
    a, b = params.a, params.b
    if x < (a + 1.0) / (a + b + 2.0):
        return 1.0 - _lower_regularized(a, b, x)
    return _lower_regularized(b, a, 1.0 - x)


def beta_cdf(params: BetaParams, x: float) -> float:
    return 1.0 - beta_tail(params, x) if 0.0 < x < 1.0 else float(x >= 1.0)


def _from_mode(mode: float, s: float) -> BetaParams:
    return BetaParams(1.0 + mode * (s - 2.0), 1.0 + (1.0 - mode) * (s - 2.0))


def elicit_beta(mode: float, threshold: float, tail_mass: float) -> BetaParams:
    """Find Beta(a, b) with the given mode and ``P(X > threshold) = tail_mass``.

    The concentration ``s = a + b`` ranges over ``(2, 1e7]``.  As ``s``
    grows the tail mass tends to 1 (threshold below the mode) or 0 (above).
    Near the uniform end it need not be monotone, so a statement can have two
    solutions; the most concentrated one is returned, found by scanning a
    geometric grid in ``s`` for the last sign change and bisecting there.

    Raises
    ------
    ElicitationError
        If no unimodal Beta with that mode satisfies the statement.
    """
    for name, v in (("mode", mode), ("threshold", threshold), ("tail_mass", tail_mass)):
        if not 0.0 < v < 1.0:
            raise ElicitationError(f"{name} must lie strictly inside (0, 1), got {v}")
    if mode == threshold:
        raise ElicitationError("threshold must differ from the mode")

    below = threshold < mode
    limit = 1.0 if below else 0.0
    # Sign that g takes for large enough s.
    sign_inf = 1.0 if below else -1.0

    def g(s: float) -> float:
        if s == 2.0:
            return (1.0 - threshold) - tail_mass
        return beta_tail(_from_mode(mode, s), threshold) - tail_mass

    bracket = None
    prev_s, prev_g = 2.0, g(2.0)
    step = 0.05
    while True:
        s = min(2.0 + step, _S_MAX)
        cur = g(s)
        if cur == 0.0:
            return _from_mode(mode, s)
        if (prev_g < 0) != (cur < 0):
            bracket = (prev_s, s)
        # Past the turning region once the tail sits between the target and its limit.
        if cur * sign_inf > 0 and abs(cur + tail_mass - limit) < 0.5 * abs(tail_mass - limit):
            break
        if s >= _S_MAX:
            break
        prev_s, prev_g = s, cur
        step *= 1.5

    if bracket is None:
        side = "below" if below else "above"
        raise ElicitationError(
            f"no Beta with mode {mode} puts mass {tail_mass} above {threshold} "
            f"(threshold {side} the mode; attainable masses lie between the uniform value "
            f"{1.0 - threshold:.6g} and {limit:g}, up to concentration {_S_MAX:.0e})"
        )

    lo, hi = bracket
    sign_lo = 1.0 if g(lo) > 0 else -1.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) * sign_lo > 0:
            lo = mid
        else:
            hi = mid
    return _from_mode(mode, 0.5 * (lo + hi))
