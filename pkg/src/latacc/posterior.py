"""Posterior summaries, confusion matrices and derived accuracy statistics."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping

import numpy as np

from .errors import SummaryError
from .model import check_rate

SUMMARY_COLUMNS = ("count", "mean", "std", "min", "25%", "50%", "75%", "max")
METRIC_NAMES = ("accuracy", "recall", "ppv", "f1")
PPV_CONVENTIONS = ("paper", "standard")


@dataclass(frozen=True)
class ChainSet:
    """Kept posterior draws, one column per named quantity.

    ``chain`` and ``iteration`` label each row: the chain index and the
    1-based sampler sweep that produced it.  Rows are ordered by chain,
    then iteration.
    """

    draws: Mapping[str, np.ndarray]
    chain: np.ndarray
    iteration: np.ndarray
    variant: str | None = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.draws.values()} | {len(self.chain), len(self.iteration)}
        if len(lengths) > 1:
            raise ValueError(f"all chain columns must have equal length, got lengths {sorted(lengths)}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.draws)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.draws[name]

    def __len__(self) -> int:
        return len(self.chain)

    @property
    def n_chains(self) -> int:
        return len(np.unique(self.chain))

    def per_chain(self, name: str) -> list[np.ndarray]:
        """Draws of one quantity split by chain index, in chain order."""
        values = self.draws[name]
        return [values[self.chain == c] for c in np.unique(self.chain)]

    def with_columns(self, extra: Mapping[str, np.ndarray]) -> "ChainSet":
        return ChainSet({**self.draws, **extra}, self.chain, self.iteration, self.variant, self.config)

    def select(self, names: Iterable[str]) -> "ChainSet":
        return ChainSet({n: self.draws[n] for n in names}, self.chain, self.iteration, self.variant, self.config)


@dataclass(frozen=True)
class QuantitySummary:
    count: int
    mean: float
    std: float
    min: float
    q25: float
    median: float
    q75: float
    max: float

    def as_row(self) -> dict:
        return dict(zip(SUMMARY_COLUMNS, (self.count, self.mean, self.std, self.min,
                                          self.q25, self.median, self.q75, self.max)))


@dataclass(frozen=True)
class PosteriorSummary:
    rows: dict[str, QuantitySummary]

    def __getitem__(self, name: str) -> QuantitySummary:
        return self.rows[name]

    def to_dict(self) -> dict:
        return {name: s.as_row() for name, s in self.rows.items()}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("quantity", *SUMMARY_COLUMNS))
        for name, s in self.rows.items():
            row = s.as_row()
            writer.writerow((name, *(row[c] for c in SUMMARY_COLUMNS)))
        return buf.getvalue()

    def table(self, digits: int = 3) -> str:
        """Plain-text table with quantities as columns."""
        names = list(self.rows)
        width = max(11, *(len(n) + 2 for n in names))
        lines = [" " * 6 + "".join(n.rjust(width) for n in names)]
        for col in SUMMARY_COLUMNS:
            vals = [self.rows[n].as_row()[col] for n in names]
            lines.append(col.ljust(6) + "".join(f"{v:{width}.{digits}f}" for v in vals))
        return "\n".join(lines)


def summarize_values(values) -> QuantitySummary:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise SummaryError("cannot summarize an empty chain")
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75], method="linear")
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return QuantitySummary(int(x.size), float(np.mean(x)), std, float(x.min()),
                           float(q25), float(q50), float(q75), float(x.max()))


def summarize(chains: ChainSet, names: Iterable[str] | None = None) -> PosteriorSummary:
    """Count, mean, sample std (n-1), min, quartiles (type 7) and max per quantity."""
    if len(chains) == 0:
        raise SummaryError("cannot summarize an empty chain set")
    names = chains.names if names is None else tuple(names)
    return PosteriorSummary({n: summarize_values(chains[n]) for n in names})


def _round_half_away(x: float) -> int:
    return int(Decimal(repr(x)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are the actual value (1, 0); columns the prediction (1, 0)."""

    proportions: tuple[tuple[float, float], tuple[float, float]]
    counts: tuple[tuple[int, int], tuple[int, int]] | None = None
    n: int | None = None

    def to_dict(self) -> dict:
        out = {
            "rows": "actual 1, actual 0",
            "columns": "predicted 1, predicted 0",
            "proportions": [list(r) for r in self.proportions],
        }
        if self.counts is not None:
            out["n"] = self.n
            out["counts"] = [list(r) for r in self.counts]
        return out


def confusion_matrix(se_hat: float, sp_hat: float, n: int | None = None) -> ConfusionMatrix:
    """Confusion matrix of a classifier from point estimates of Se and Sp.

    With ``n`` given, every entry is also scaled by ``n`` and rounded half
    away from zero.
    """
    se = check_rate(se_hat, "se_hat")
    sp = check_rate(sp_hat, "sp_hat")
    props = ((se, 1.0 - se), (1.0 - sp, sp))
    counts = None
    if n is not None:
        if n < 0 or int(n) != n:
            raise ValueError(f"n must be a non-negative integer, got {n}")
        counts = tuple(tuple(_round_half_away(v * n) for v in row) for row in props)
    return ConfusionMatrix(props, counts, None if n is None else int(n))


def accuracy(se, sp, pi):
    return se * pi + sp * (1 - pi)


def ppv(se, sp, pi, convention: str = "standard"):
    """Positive predictive value.

    ``standard`` is P(true 1 | predicted 1).  ``paper`` is an alternate
    form whose denominator uses ``(1 - se)`` in place of the false-positive
    rate ``(1 - sp)``; kept for comparison with reference results.
    """
    if convention == "standard":
        false_pos = (1 - sp) * (1 - pi)
    elif convention == "paper":
        false_pos = (1 - se) * (1 - pi)
    else:
        raise ValueError(f"unknown ppv convention {convention!r}; expected one of {PPV_CONVENTIONS}")
    true_pos = se * pi
    denom = true_pos + false_pos
    if np.any(np.asarray(denom) == 0):
        raise ZeroDivisionError("PPV undefined: zero predicted-positive probability")
    return true_pos / denom


def f1_score(se, ppv_value):
    denom = se + ppv_value
    if np.any(np.asarray(denom) == 0):
        raise ZeroDivisionError("F1 undefined: sensitivity and PPV are both zero")
    return 2 * se * ppv_value / denom


def derived_chains(chains: ChainSet, which_classifier: str = "A", ppv_convention: str = "standard",
                   prevalence: str = "pi") -> ChainSet:
    """Accuracy, recall, PPV and F1 computed draw by draw.

    ``prevalence`` names the prevalence chain to pair with; for the
    two-datasets model use ``"pi"`` (first dataset) or ``"pi_beta"``.
    """
    if which_classifier not in ("A", "B"):
        raise ValueError(f"which_classifier must be 'A' or 'B', got {which_classifier!r}")
    if len(chains) == 0:
        raise SummaryError("cannot derive statistics from an empty chain set")
    se = np.asarray(chains[f"Se_{which_classifier}"], dtype=float)
    sp = np.asarray(chains[f"Sp_{which_classifier}"], dtype=float)
    pi = np.asarray(chains[prevalence], dtype=float)
    ppv_chain = ppv(se, sp, pi, ppv_convention)
    metrics = {
        "accuracy": accuracy(se, sp, pi),
        "recall": se.copy(),
        "ppv": ppv_chain,
        "f1": f1_score(se, ppv_chain),
    }
    return ChainSet(metrics, chains.chain, chains.iteration, chains.variant, chains.config)
