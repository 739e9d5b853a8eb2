"""Brute-force posterior means by midpoint-rule integration.

Independent of the sampler: it evaluates the joint log-posterior on a
regular grid over the open unit hypercube and normalizes numerically.
Useful for auditing fits on small problems.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import GridError
from .model import CrossTab, log_posterior_kernel, n_datasets, parameter_names
from .priors import PriorSet

MAX_GRID_POINTS = 10**9
DEFAULT_POINTS = {1: 25, 2: 17}


def grid_posterior_means(model_variant: str, tabs: Sequence[CrossTab], priors: PriorSet,
                         points_per_dim: int | None = None, constrained: bool = True) -> dict[str, float]:
    """Posterior mean of every parameter on a ``points_per_dim``-per-axis grid.

    Grid nodes sit at ``(k + 0.5) / points_per_dim``.  With ``constrained``
    the region ``Se + Sp <= 1`` of either classifier gets zero mass.  The
    integral is accumulated slab by slab along the first axis in a fixed
    order, so results are reproducible bit for bit.
    """
    n_sets = n_datasets(model_variant)
    if len(tabs) != n_sets or priors.n_datasets != n_sets:
        raise GridError(f"{model_variant} model needs {n_sets} cross-tab(s) and prevalence prior(s)")
    k = DEFAULT_POINTS[n_sets] if points_per_dim is None else int(points_per_dim)
    dim = 4 + n_sets
    if k < 11:
        raise GridError(f"points_per_dim must be at least 11, got {k}")
    if k**dim > MAX_GRID_POINTS:
        raise GridError(f"grid of {k}^{dim} points exceeds the limit of {MAX_GRID_POINTS:.0e}")

    t = (np.arange(k) + 0.5) / k
    # Axes after the first (sliced) one, broadcast against each other.
    rest = [t.reshape([k if i == j else 1 for i in range(dim - 1)]) for j in range(dim - 1)]
    sp_a, se_b, sp_b = rest[0], rest[1], rest[2]
    prevs = rest[3:]
    mask_b = (se_b + sp_b) > 1.0

    slab_max = np.empty(k)
    slab_mass = np.empty(k)
    slab_moments = np.empty((k, dim))
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, se_a in enumerate(t):
            lp = log_posterior_kernel(se_a, sp_a, se_b, sp_b, prevs, tabs, priors)
            lp = np.broadcast_to(lp, (k,) * (dim - 1))
            if constrained:
                lp = np.where(mask_b & ((se_a + sp_a) > 1.0), lp, -np.inf)
            m = lp.max()
            slab_max[i] = m
            if not np.isfinite(m):
                slab_mass[i] = 0.0
                slab_moments[i] = 0.0
                continue
            w = np.exp(lp - m)
            mass = w.sum()
            slab_mass[i] = mass
            slab_moments[i, 0] = se_a * mass
            for j in range(dim - 1):
                axes = tuple(a for a in range(dim - 1) if a != j)
                slab_moments[i, j + 1] = (w.sum(axis=axes) * t).sum()

    finite = np.isfinite(slab_max)
    if not finite.any():
        raise GridError("posterior mass underflows to zero on the grid")
    top = slab_max[finite].max()
    scale = np.where(finite, np.exp(np.where(finite, slab_max, top) - top), 0.0)
    total = (scale * slab_mass).sum()
    if total <= 0.0 or not np.isfinite(total):
        raise GridError("posterior mass underflows to zero on the grid")
    means = (scale[:, None] * slab_moments).sum(axis=0) / total
    return dict(zip(parameter_names(model_variant), (float(v) for v in means)))
