"""Convergence diagnostics: split R-hat, effective sample size and MCSE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticsError
from .posterior import ChainSet

RHAT_WARN = 1.05
ESS_WARN = 400.0
ESS_CAP_FACTOR = 1.5


def _as_chains(chains, quantity):
    if isinstance(chains, ChainSet):
        return [np.asarray(c, dtype=float) for c in chains.per_chain(quantity)]
    return [np.asarray(c, dtype=float) for c in chains]


def split_rhat(chains: ChainSet | list, quantity: str | None = None) -> float:
    """Potential scale reduction computed on half-chains.

    Each chain is cut into a first and second half (the middle draw is dropped
    for odd lengths) and the Gelman-Rubin ratio is formed over all halves.
    Values below 1 are sampling noise and are reported as 1.0; identical
    constant chains also give 1.0.
    """
    seqs = _as_chains(chains, quantity)
    if len(seqs) < 2:
        raise DiagnosticsError(f"split R-hat needs at least 2 chains, got {len(seqs)}")
    n = min(len(s) for s in seqs)
    if n < 4:
        raise DiagnosticsError(f"split R-hat needs at least 4 draws per chain, got {n}")
    half = n // 2
    halves = []
    for s in seqs:
        s = s[:n]
        halves.append(s[:half])
        halves.append(s[n - half:])
    halves = np.array(halves)
    means = halves.mean(axis=1)
    within = halves.var(axis=1, ddof=1).mean()
    between = half * means.var(ddof=1)
    if within == 0.0:
        return 1.0 if between == 0.0 else float("inf")
    var_plus = (half - 1) / half * within + between / half
    return float(max(1.0, np.sqrt(var_plus / within)))


def _autocovariance(x: np.ndarray) -> np.ndarray:
    n = len(x)
    centered = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(centered, size)
    return np.fft.irfft(f * np.conj(f), size)[:n] / n


def _chain_ess(x: np.ndarray) -> float:
    n = len(x)
    acov = _autocovariance(x)
    if acov[0] <= 0.0:
        return float(n)
    rho = acov / acov[0]
    # Geyer's initial positive sequence: sum adjacent-lag pairs while positive.
    tau = -1.0
    for k in range(0, n - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
    if tau <= 1.0 / ESS_CAP_FACTOR:
        return ESS_CAP_FACTOR * n
    return n / tau


def effective_sample_size(chains: ChainSet | list, quantity: str | None = None) -> float:
    """Initial-positive-sequence ESS per chain, summed over chains.

    Antithetic chains can have ESS above their length; the total is capped
    at 1.5 times the number of draws.  A zero-variance chain counts its
    full length.
    """
    seqs = _as_chains(chains, quantity)
    if not seqs:
        raise DiagnosticsError("no chains given")
    for s in seqs:
        if len(s) < 8:
            raise DiagnosticsError(f"ESS needs at least 8 draws per chain, got {len(s)}")
    total = sum(len(s) for s in seqs)
    ess = sum(_chain_ess(s) for s in seqs)
    return float(min(ess, ESS_CAP_FACTOR * total))


@dataclass(frozen=True)
class QuantityDiagnostics:
    rhat: float | None
    ess: float
    mcse: float

    def to_dict(self) -> dict:
        return {"rhat": self.rhat, "ess": self.ess, "mcse": self.mcse}


@dataclass(frozen=True)
class DiagnosticsReport:
    rows: dict[str, QuantityDiagnostics]
    warnings: tuple[str, ...] = ()

    def __getitem__(self, name: str) -> QuantityDiagnostics:
        return self.rows[name]

    def to_dict(self) -> dict:
        return {"quantities": {k: v.to_dict() for k, v in self.rows.items()}, "warnings": list(self.warnings)}


def diagnose(chains: ChainSet, names=None) -> DiagnosticsReport:
    """R-hat, ESS and MCSE for each quantity, with threshold warnings.

    R-hat is left as ``None`` for single-chain runs.
    """
    names = chains.names if names is None else tuple(names)
    rows = {}
    warnings = []
    if chains.n_chains < 2:
        warnings.append("only one chain: split R-hat not computed")
    for name in names:
        rhat = split_rhat(chains, name) if chains.n_chains >= 2 else None
        ess = effective_sample_size(chains, name)
        values = np.asarray(chains[name], dtype=float)
        sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        mcse = sd / np.sqrt(ess)
        rows[name] = QuantityDiagnostics(rhat, ess, float(mcse))
        if rhat is not None and rhat > RHAT_WARN:
            warnings.append(f"{name}: R-hat {rhat:.3f} exceeds {RHAT_WARN}")
        if ess < ESS_WARN:
            warnings.append(f"{name}: ESS {ess:.0f} below {ESS_WARN:.0f}")
    return DiagnosticsReport(rows, tuple(warnings))
