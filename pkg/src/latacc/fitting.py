"""End-to-end fit: sample, derive metrics, summarize, diagnose."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Sequence

from . import __version__
from .diagnostics import diagnose
from .errors import ConfigError
from .gibbs import run_chain
from .io import FitConfig
from .model import CrossTab
from .posterior import ChainSet, PosteriorSummary, confusion_matrix, derived_chains, summarize


@dataclass
class FitResult:
    chains: ChainSet
    parameter_summary: PosteriorSummary
    metric_summary: PosteriorSummary
    report: dict


def fit(config: FitConfig, tabs: Sequence[CrossTab] | None = None) -> FitResult:
    tabs = list(tabs) if tabs else list(config.tabs)
    if not tabs:
        raise ConfigError("no data: give cross-tabs or prediction files")
    params = run_chain(config.variant, tabs, config.priors, config.sampler)
    metrics = derived_chains(params, config.classifier, config.ppv_convention, config.prevalence)
    chains = params.with_columns(metrics.draws)

    param_summary = summarize(params)
    metric_summary = summarize(metrics)
    diag = diagnose(params)

    c = config.classifier
    n = config.confusion_n
    if n is None and len(tabs) == 1:
        n = tabs[0].n
    cm = confusion_matrix(param_summary[f"Se_{c}"].mean, param_summary[f"Sp_{c}"].mean, n)

    report = {
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "model": config.variant,
        "seed": config.sampler.seed,
        "config": {
            "priors": {name: p.to_dict() for name, p in zip(params.names, config.priors.as_list())},
            "sampler": config.sampler.to_dict(),
            "ppv_convention": config.ppv_convention,
            "classifier": c,
            "prevalence": config.prevalence,
            "confusion_n": config.confusion_n,
        },
        "crosstabs": [dict(zip(("y1", "y2", "y3", "y4", "n"), (*t.counts(), t.n))) for t in tabs],
        "parameter_summary": param_summary.to_dict(),
        "metric_summary": metric_summary.to_dict(),
        "confusion_matrix": {"classifier": c, **cm.to_dict()},
        "diagnostics": diag.to_dict(),
        "warnings": list(diag.warnings),
    }
    return FitResult(chains, param_summary, metric_summary, report)
