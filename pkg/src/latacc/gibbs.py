"""Gibbs sampling with latent true labels.

Given the parameters, the number of truly positive items in each cross-tab
cell is binomial.  Given those latent counts every parameter has a Beta full
conditional, so each sweep is two exact draws and no tuning is needed.

Random streams: chain ``k`` of a run seeded with ``seed`` uses
``numpy.random.Generator(PCG64(SeedSequence(seed, spawn_key=(k,))))``,
which is the stream ``SeedSequence(seed).spawn(k + 1)[k]`` would produce.
Chains therefore depend only on ``(seed, k)`` and not on how many chains run.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, IdentifiabilityError, SamplerStateError
from .model import CrossTab, ParamState, cell_terms, n_datasets, parameter_names
from .posterior import ChainSet
from .priors import PriorSet

MAX_REJECTIONS = 1000
INIT_JITTER = 0.05
_LOW = float(np.nextafter(0.0, 1.0))
_HIGH = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class SamplerConfig:
    n_iterations: int = 20_000
    burn_in: int = 5_000
    thin: int = 5
    n_chains: int = 4
    seed: int = 0
    enforce_identifiability: bool = True

    def __post_init__(self):
        for name in ("n_iterations", "burn_in", "thin", "n_chains", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if self.n_iterations < 1:
            raise ConfigError("n_iterations must be positive")
        if self.thin < 1:
            raise ConfigError("thin must be positive")
        if self.n_chains < 1:
            raise ConfigError("n_chains must be positive")
        if not 0 <= self.burn_in < self.n_iterations:
            raise ConfigError(f"burn_in ({self.burn_in}) must satisfy 0 <= burn_in < n_iterations ({self.n_iterations})")
        if self.kept_per_chain < 100:
            raise ConfigError(f"(n_iterations - burn_in) / thin must be at least 100, got {self.kept_per_chain}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @property
    def kept_per_chain(self) -> int:
        return (self.n_iterations - self.burn_in) // self.thin

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LatentSplit:
    """Number of items in each cell whose (unobserved) true label is 1."""

    z1: int
    z2: int
    z3: int
    z4: int

    def counts(self) -> tuple[int, int, int, int]:
        return (self.z1, self.z2, self.z3, self.z4)

    def check_against(self, tab: CrossTab) -> None:
        for z, y in zip(self.counts(), tab.counts()):
            if not 0 <= z <= y:
                raise ValueError(f"latent split {self.counts()} inconsistent with cross-tab {tab.counts()}")


def chain_rng(seed: int, chain_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chain_index,))))


def positive_fractions(theta: Sequence[float], n_sets: int) -> list[float]:
    """Per cell, the probability that an item in it is truly positive.

    Returned flat, dataset by dataset, four cells each.
    """
    se_a, sp_a, se_b, sp_b = theta[:4]
    out = []
    for d in range(n_sets):
        pos, neg = cell_terms(se_a, sp_a, se_b, sp_b, theta[4 + d])
        for t, u in zip(pos, neg):
            p = t + u
            # A zero-probability cell can only be drawn from if it is empty.
            out.append(t / p if p > 0.0 else float("nan"))
    return out


def conditional_shapes(y: np.ndarray, z: np.ndarray, priors: PriorSet) -> tuple[np.ndarray, np.ndarray]:
    """Beta shape parameters of every full conditional given latent counts.

    ``y`` and ``z`` have shape ``(n_datasets, 4)``.  Returned arrays follow
    parameter order Se_A, Sp_A, Se_B, Sp_B, prevalences.
    """
    pos = z.sum(axis=0)
    neg = (y - z).sum(axis=0)
    prior_list = priors.as_list()
    a0 = np.array([p.a for p in prior_list])
    b0 = np.array([p.b for p in prior_list])
    z_tot = z.sum(axis=1)
    n_tot = y.sum(axis=1)
    add_a = np.concatenate(([pos[0] + pos[1], neg[2] + neg[3], pos[0] + pos[2], neg[1] + neg[3]], z_tot))
    add_b = np.concatenate(([pos[2] + pos[3], neg[0] + neg[1], pos[1] + pos[3], neg[0] + neg[2]], n_tot - z_tot))
    return a0 + add_a, b0 + add_b


def _draw_parameters(rng, shape_a, shape_b, enforce_identifiability) -> list[float]:
    # Scalar draws in parameter order; much cheaper than array calls at this size.
    beta = rng.beta
    theta = [min(max(beta(a, b), _LOW), _HIGH) for a, b in zip(shape_a, shape_b)]
    if enforce_identifiability:
        # Se and Sp of one classifier are conditionally independent given the
        # latents, so redrawing the pair samples their truncated joint exactly.
        for j in (0, 2):
            attempts = 0
            while theta[j] + theta[j + 1] <= 1.0:
                attempts += 1
                if attempts > MAX_REJECTIONS:
                    label = "A" if j == 0 else "B"
                    raise IdentifiabilityError(
                        f"could not draw Se_{label} + Sp_{label} > 1 in {MAX_REJECTIONS} attempts; "
                        "the data favour the label-flipped solution, use more informative priors"
                    )
                theta[j] = min(max(beta(shape_a[j], shape_b[j]), _LOW), _HIGH)
                theta[j + 1] = min(max(beta(shape_a[j + 1], shape_b[j + 1]), _LOW), _HIGH)
    return theta


def _draw_latents(rng, y_flat, probs) -> list[int]:
    binomial = rng.binomial
    out = []
    for n, p in zip(y_flat, probs):
        if not n:
            out.append(0)
        elif p != p:
            raise SamplerStateError("observed counts in a cell with zero probability under the current state")
        else:
            out.append(binomial(n, p))
    return out


def sample_latents(tab: CrossTab, state: ParamState, prevalence_index: int, rng: np.random.Generator) -> LatentSplit:
    """Draw the positive-label count of each cell of one dataset.

    Boundary rates are allowed as long as every non-empty cell keeps positive
    probability; otherwise SamplerStateError is raised.
    """
    if not 0 <= prevalence_index < len(state.prevalences):
        raise IndexError(f"prevalence_index {prevalence_index} out of range")
    theta = [state.se_a, state.sp_a, state.se_b, state.sp_b, state.prevalences[prevalence_index]]
    probs = positive_fractions(theta, 1)
    return LatentSplit(*_draw_latents(rng, tab.counts(), probs))


def update_parameters(latents: Sequence[LatentSplit], tabs: Sequence[CrossTab], priors: PriorSet,
                      rng: np.random.Generator, enforce_identifiability: bool = False) -> ParamState:
    """Draw every parameter from its Beta full conditional given the latents."""
    if not len(latents) == len(tabs) == priors.n_datasets:
        raise ValueError("need one latent split and one cross-tab per dataset prior")
    for z, tab in zip(latents, tabs):
        z.check_against(tab)
    y = np.array([t.counts() for t in tabs], dtype=np.int64)
    z = np.array([l.counts() for l in latents], dtype=np.int64)
    shape_a, shape_b = conditional_shapes(y, z, priors)
    return ParamState.from_array(_draw_parameters(rng, shape_a.tolist(), shape_b.tolist(), enforce_identifiability))


def initial_state(priors: PriorSet, chain_index: int, n_chains: int, enforce_identifiability: bool) -> np.ndarray:
    """Prior means, shifted by a per-chain stratified offset in [-0.05, 0.05].

    When the constraint is on and a classifier starts with Se + Sp <= 1 (as
    flat priors do), both of its rates are raised equally to sum to 1.1 so
    the chain starts in the constrained mode.
    """
    offset = 0.0 if n_chains == 1 else -INIT_JITTER + 2 * INIT_JITTER * chain_index / (n_chains - 1)
    theta = np.array([p.mean for p in priors.as_list()]) + offset
    theta = np.clip(theta, 0.01, 0.99)
    if enforce_identifiability:
        for j in (0, 2):
            total = theta[j] + theta[j + 1]
            if total <= 1.0:
                theta[j:j + 2] = np.clip(theta[j:j + 2] + (1.1 - total) / 2, 0.01, 0.99)
    return theta


def _run_single(y: np.ndarray, priors: PriorSet, config: SamplerConfig, chain_index: int) -> tuple[np.ndarray, np.ndarray]:
    rng = chain_rng(config.seed, chain_index)
    n_sets = y.shape[0]
    theta = initial_state(priors, chain_index, config.n_chains, config.enforce_identifiability).tolist()
    y_flat = y.reshape(-1).tolist()
    y_rows = y.tolist()
    n_rows = [sum(r) for r in y_rows]
    prior_list = priors.as_list()
    a0 = [p.a for p in prior_list]
    b0 = [p.b for p in prior_list]
    kept = np.empty((config.kept_per_chain, len(theta)))
    iterations = np.empty(config.kept_per_chain, dtype=np.int64)
    k = 0
    last = config.burn_in + config.kept_per_chain * config.thin
    for it in range(1, last + 1):
        probs = positive_fractions(theta, n_sets)
        z = _draw_latents(rng, y_flat, probs)
        # Same tallies as conditional_shapes, on plain floats for speed.
        p1 = p2 = p3 = p4 = n1 = n2 = n3 = n4 = 0
        z_tot = []
        for d in range(n_sets):
            z1, z2, z3, z4 = z[4 * d:4 * d + 4]
            y1, y2, y3, y4 = y_rows[d]
            p1 += z1; p2 += z2; p3 += z3; p4 += z4
            n1 += y1 - z1; n2 += y2 - z2; n3 += y3 - z3; n4 += y4 - z4
            z_tot.append(z1 + z2 + z3 + z4)
        shape_a = [a0[0] + p1 + p2, a0[1] + n3 + n4, a0[2] + p1 + p3, a0[3] + n2 + n4]
        shape_b = [b0[0] + p3 + p4, b0[1] + n1 + n2, b0[2] + p2 + p4, b0[3] + n1 + n3]
        for d in range(n_sets):
            shape_a.append(a0[4 + d] + z_tot[d])
            shape_b.append(b0[4 + d] + n_rows[d] - z_tot[d])
        theta = _draw_parameters(rng, shape_a, shape_b, config.enforce_identifiability)
        if it > config.burn_in and (it - config.burn_in) % config.thin == 0:
            kept[k] = theta
            iterations[k] = it
            k += 1
    return kept, iterations


def run_chain(model_variant: str, tabs: Sequence[CrossTab], priors: PriorSet,
              config: SamplerConfig | None = None) -> ChainSet:
    """Run ``config.n_chains`` independent chains and merge them by chain index."""
    config = config or SamplerConfig()
    n_sets = n_datasets(model_variant)
    if len(tabs) != n_sets:
        raise ConfigError(f"{model_variant} model needs {n_sets} cross-tab(s), got {len(tabs)}")
    if priors.n_datasets != n_sets:
        raise ConfigError(f"{model_variant} model needs {n_sets} prevalence prior(s), got {priors.n_datasets}")
    y = np.array([t.counts() for t in tabs], dtype=np.int64)

    blocks, its, labels = [], [], []
    for c in range(config.n_chains):
        kept, iterations = _run_single(y, priors, config, c)
        blocks.append(kept)
        its.append(iterations)
        labels.append(np.full(len(iterations), c, dtype=np.int64))
    values = np.vstack(blocks)
    names = parameter_names(model_variant)
    draws = {name: values[:, i].copy() for i, name in enumerate(names)}
    return ChainSet(draws, np.concatenate(labels), np.concatenate(its), model_variant, config.to_dict())
