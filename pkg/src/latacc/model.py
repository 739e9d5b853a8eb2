"""Latent-class models for two binary classifiers on one or two unlabeled datasets.

Cross-tab cells are always ordered (A=1,B=1), (A=1,B=0), (A=0,B=1), (A=0,B=0).
Each cell probability is a mixture of a term from truly positive items
(weighted by the prevalence) and a term from truly negative items; the
classifiers are assumed conditionally independent given the true label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betaln, gammaln, xlogy

from .priors import BetaParams, PriorSet

ONE_DATASET = "one-dataset"
TWO_DATASETS = "two-datasets"
VARIANTS = (ONE_DATASET, TWO_DATASETS)

RATE_NAMES = ("Se_A", "Sp_A", "Se_B", "Sp_B")
PREVALENCE_NAMES = ("pi", "pi_beta")


def check_rate(value: float, name: str = "rate") -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def n_datasets(variant: str) -> int:
    if variant == ONE_DATASET:
        return 1
    if variant == TWO_DATASETS:
        return 2
    raise ValueError(f"unknown model variant {variant!r}; expected one of {VARIANTS}")


def parameter_names(variant: str) -> tuple[str, ...]:
    return RATE_NAMES + PREVALENCE_NAMES[: n_datasets(variant)]


@dataclass(frozen=True)
class CrossTab:
    y1: int
    y2: int
    y3: int
    y4: int

    def __post_init__(self):
        for name in ("y1", "y2", "y3", "y4"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def n(self) -> int:
        return self.y1 + self.y2 + self.y3 + self.y4

    def counts(self) -> tuple[int, int, int, int]:
        return (self.y1, self.y2, self.y3, self.y4)

    def transposed(self) -> "CrossTab":
        """The same table with the classifiers' roles exchanged."""
        return CrossTab(self.y1, self.y3, self.y2, self.y4)


@dataclass(frozen=True)
class CellProbs:
    p1: float
    p2: float
    p3: float
    p4: float

    def __post_init__(self):
        ps = self.as_tuple()
        if any(p < 0 for p in ps) or abs(math.fsum(ps) - 1.0) > 1e-12:
            raise ValueError(f"cell probabilities must lie on the simplex, got {ps}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p1, self.p2, self.p3, self.p4)


@dataclass(frozen=True)
class ParamState:
    se_a: float
    sp_a: float
    se_b: float
    sp_b: float
    prevalences: tuple[float, ...]

    def __post_init__(self):
        for name in ("se_a", "sp_a", "se_b", "sp_b"):
            object.__setattr__(self, name, check_rate(getattr(self, name), name))
        prevs = tuple(check_rate(p, "prevalence") for p in self.prevalences)
        if len(prevs) not in (1, 2):
            raise ValueError("a state carries one or two prevalences")
        object.__setattr__(self, "prevalences", prevs)

    @property
    def variant(self) -> str:
        return VARIANTS[len(self.prevalences) - 1]

    def as_array(self) -> np.ndarray:
        return np.array([self.se_a, self.sp_a, self.se_b, self.sp_b, *self.prevalences])

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "ParamState":
        return cls(*(float(v) for v in values[:4]), prevalences=tuple(float(v) for v in values[4:]))

    def swapped(self) -> "ParamState":
        """Exchange the roles of classifiers A and B."""
        return ParamState(self.se_b, self.sp_b, self.se_a, self.sp_a, self.prevalences)

    def mirrored(self) -> "ParamState":
        """The label-flipped state that yields identical cell probabilities."""
        return ParamState(
            1 - self.sp_a, 1 - self.se_a, 1 - self.sp_b, 1 - self.se_b,
            tuple(1 - p for p in self.prevalences),
        )


def cell_terms(se_a, sp_a, se_b, sp_b, pi):
    """Split each cell probability into its positive-label and negative-label parts.

    Works elementwise on floats or broadcastable arrays.  Returns two
    4-tuples ``(pos, neg)`` with ``p_i = pos[i] + neg[i]``.
    """
    q = 1 - pi
    pos = (
        pi * se_a * se_b,
        pi * se_a * (1 - se_b),
        pi * (1 - se_a) * se_b,
        pi * (1 - se_a) * (1 - se_b),
    )
    neg = (
        q * (1 - sp_a) * (1 - sp_b),
        q * (1 - sp_a) * sp_b,
        q * sp_a * (1 - sp_b),
        q * sp_a * sp_b,
    )
    return pos, neg


def cell_probs(state: ParamState, prevalence_index: int = 0) -> CellProbs:
    if not 0 <= prevalence_index < len(state.prevalences):
        raise IndexError(
            f"prevalence_index {prevalence_index} out of range for a state with "
            f"{len(state.prevalences)} prevalence(s)"
        )
    pos, neg = cell_terms(state.se_a, state.sp_a, state.se_b, state.sp_b, state.prevalences[prevalence_index])
    return CellProbs(*(t + u for t, u in zip(pos, neg)))


def _log_multinomial(counts, probs):
    # xlogy gives 0 * log(0) = 0 and y * log(0) = -inf for y > 0.
    n = sum(counts)
    out = gammaln(n + 1)
    for y, p in zip(counts, probs):
        out = out - gammaln(y + 1) + xlogy(y, p)
    return out


def log_likelihood(tab: CrossTab, probs: CellProbs) -> float:
    """Log multinomial pmf of the cross-tab, multinomial coefficient included."""
    return float(_log_multinomial(tab.counts(), probs.as_tuple()))


def beta_logpdf(x, prior: BetaParams):
    """Normalized Beta log-density.

    At the boundaries this follows the density itself: ``-inf`` where it
    vanishes (shape > 1), ``+inf`` where it diverges (shape < 1).
    """
    return xlogy(prior.a - 1, x) + xlogy(prior.b - 1, 1 - x) - betaln(prior.a, prior.b)


def log_posterior_kernel(se_a, sp_a, se_b, sp_b, prevalences, tabs: Sequence[CrossTab], priors: PriorSet):
    """Vectorized joint log-posterior up to the log marginal likelihood.

    Accepts floats or broadcastable arrays for every parameter.  Both the
    multinomial coefficients and the Beta normalizing constants are
    included, so the result is ``log p(data | theta) + log p(theta)``.
    """
    if len(prevalences) != len(tabs) or len(tabs) != priors.n_datasets:
        raise ValueError("need one cross-tab and one prevalence prior per prevalence")
    total = (
        beta_logpdf(se_a, priors.se_a)
        + beta_logpdf(sp_a, priors.sp_a)
        + beta_logpdf(se_b, priors.se_b)
        + beta_logpdf(sp_b, priors.sp_b)
    )
    for pi, tab, prior in zip(prevalences, tabs, priors.prevalence_priors):
        pos, neg = cell_terms(se_a, sp_a, se_b, sp_b, pi)
        probs = [t + u for t, u in zip(pos, neg)]
        total = total + beta_logpdf(pi, prior) + _log_multinomial(tab.counts(), probs)
    return total


def joint_log_posterior(state: ParamState, tabs: Sequence[CrossTab], priors: PriorSet) -> float:
    """Log of likelihood times prior density at ``state`` (normalizers included)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        value = log_posterior_kernel(
            state.se_a, state.sp_a, state.se_b, state.sp_b, state.prevalences, tabs, priors
        )
    return float(value)
