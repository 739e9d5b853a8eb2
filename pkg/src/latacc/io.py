"""Prediction files, chain CSVs and the JSON fit configuration."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .gibbs import SamplerConfig
from .model import PREVALENCE_NAMES, RATE_NAMES, VARIANTS, CrossTab, n_datasets
from .posterior import PPV_CONVENTIONS, ChainSet
from .priors import UNIFORM, BetaParams, PriorSet, elicit_beta

HEADER_TOKEN = "prediction"
SEED_ENV = "LATACC_SEED"


def read_predictions(path) -> list[int]:
    """Read a newline-delimited list of 0/1 predictions.

    Blank lines are skipped.  A first line reading ``prediction`` is
    returned as a header marker (``-1``) so the caller can check both files
    agree on having one.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read predictions file {path}: {exc.strerror}") from exc
    values = []
    seen_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        token = raw.strip()
        if not token:
            continue
        if token == HEADER_TOKEN and not seen_data and not values:
            values.append(-1)
            continue
        if token not in ("0", "1"):
            raise DataError(f"{path}: line {lineno}: expected '0' or '1', got {token!r}")
        values.append(int(token))
        seen_data = True
    return values


def crosstab_from_lists(a, b) -> CrossTab:
    if len(a) != len(b):
        raise DataError(f"prediction lists differ in length: {len(a)} for A vs {len(b)} for B")
    y = [0, 0, 0, 0]
    for pa, pb in zip(a, b):
        y[(1 - pa) * 2 + (1 - pb)] += 1
    return CrossTab(*y)


def crosstab(file_a, file_b) -> CrossTab:
    """Cross-tabulate classifier A's and B's predictions on the same items."""
    a = read_predictions(file_a)
    b = read_predictions(file_b)
    a_header = bool(a) and a[0] == -1
    b_header = bool(b) and b[0] == -1
    if a_header and b_header:
        a, b = a[1:], b[1:]
    elif a_header or b_header:
        which = file_a if a_header else file_b
        raise DataError(f"header line '{HEADER_TOKEN}' found only in {which}; use it in both files or neither")
    if len(a) != len(b):
        raise DataError(f"prediction files differ in length: {len(a)} lines in {file_a} vs {len(b)} lines in {file_b}")
    return crosstab_from_lists(a, b)


def chain_columns(chains: ChainSet) -> list[str]:
    return ["chain", "iteration", *chains.names]


def write_chains_csv(chains: ChainSet, path) -> None:
    cols = [chains[n].tolist() for n in chains.names]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(chain_columns(chains))
        for i, (c, it) in enumerate(zip(chains.chain.tolist(), chains.iteration.tolist())):
            writer.writerow([c, it, *(repr(col[i]) for col in cols)])


def read_chains_csv(path) -> ChainSet:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read chain file {path}: {exc.strerror}") from exc
    if not rows or rows[0][:2] != ["chain", "iteration"]:
        raise DataError(f"{path}: chain CSV must start with columns 'chain,iteration'")
    header, body = rows[0], rows[1:]
    if not body:
        raise DataError(f"{path}: chain CSV has no draws")
    try:
        data = np.array(body, dtype=float)
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric value in chain CSV") from exc
    draws = {name: data[:, j] for j, name in enumerate(header) if j >= 2}
    variant = VARIANTS[1] if "pi_beta" in draws else VARIANTS[0]
    return ChainSet(draws, data[:, 0].astype(np.int64), data[:, 1].astype(np.int64), variant)


def _prior_from_spec(name: str, spec) -> BetaParams:
    if not isinstance(spec, dict):
        raise ConfigError(f"prior for {name} must be an object")
    explicit = {"a", "b"} & spec.keys()
    statement = {"mode", "threshold", "tail_mass"} & spec.keys()
    unknown = spec.keys() - {"a", "b", "mode", "threshold", "tail_mass"}
    if unknown:
        raise ConfigError(f"prior for {name} has unknown keys {sorted(unknown)}")
    if explicit and statement:
        raise ConfigError(f"prior for {name} gives both explicit shapes and an elicitation statement")
    if explicit:
        if explicit != {"a", "b"}:
            raise ConfigError(f"prior for {name} needs both 'a' and 'b'")
        try:
            return BetaParams(float(spec["a"]), float(spec["b"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"prior for {name}: {exc}") from exc
    if statement != {"mode", "threshold", "tail_mass"}:
        raise ConfigError(f"prior for {name} needs either {{a, b}} or {{mode, threshold, tail_mass}}")
    return elicit_beta(float(spec["mode"]), float(spec["threshold"]), float(spec["tail_mass"]))


@dataclass
class FitConfig:
    variant: str
    priors: PriorSet
    sampler: SamplerConfig
    ppv_convention: str = "standard"
    classifier: str = "A"
    prevalence: str = "pi"
    confusion_n: int | None = None
    tabs: list[CrossTab] = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    def with_seed(self, seed: int) -> "FitConfig":
        sampler = SamplerConfig(**{**self.sampler.to_dict(), "seed": seed})
        return FitConfig(self.variant, self.priors, sampler, self.ppv_convention, self.classifier,
                         self.prevalence, self.confusion_n, list(self.tabs), self.raw)


_TOP_KEYS = {"model", "priors", "sampler", "ppv_convention", "report", "data"}


def parse_config(raw: dict, base_dir=".") -> FitConfig:
    """Validate a configuration mapping before anything is sampled."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = raw.keys() - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    variant = raw.get("model", "one-dataset")
    try:
        n_sets = n_datasets(variant)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    prior_specs = raw.get("priors", {})
    if not isinstance(prior_specs, dict):
        raise ConfigError("'priors' must be an object keyed by parameter name")
    names = RATE_NAMES + PREVALENCE_NAMES[:n_sets]
    extra = prior_specs.keys() - set(names)
    if extra:
        raise ConfigError(f"priors given for unknown parameters {sorted(extra)}; expected {list(names)}")
    resolved = {n: _prior_from_spec(n, prior_specs[n]) if n in prior_specs else UNIFORM for n in names}
    priors = PriorSet(resolved["Se_A"], resolved["Sp_A"], resolved["Se_B"], resolved["Sp_B"],
                      tuple(resolved[n] for n in PREVALENCE_NAMES[:n_sets]))

    sampler_spec = raw.get("sampler", {})
    if not isinstance(sampler_spec, dict):
        raise ConfigError("'sampler' must be an object")
    try:
        sampler = SamplerConfig(**sampler_spec)
    except TypeError as exc:
        raise ConfigError(f"bad sampler settings: {exc}") from exc

    ppv_convention = raw.get("ppv_convention", "standard")
    if ppv_convention not in PPV_CONVENTIONS:
        raise ConfigError(f"ppv_convention must be one of {PPV_CONVENTIONS}, got {ppv_convention!r}")

    report = raw.get("report", {})
    if not isinstance(report, dict) or report.keys() - {"classifier", "prevalence", "confusion_n"}:
        raise ConfigError("'report' accepts only classifier, prevalence and confusion_n")
    classifier = report.get("classifier", "A")
    if classifier not in ("A", "B"):
        raise ConfigError("report.classifier must be 'A' or 'B'")
    prevalence = report.get("prevalence", "pi")
    if prevalence not in PREVALENCE_NAMES[:n_sets]:
        raise ConfigError(f"report.prevalence must be one of {list(PREVALENCE_NAMES[:n_sets])}")
    confusion_n = report.get("confusion_n")
    if confusion_n is not None and (not isinstance(confusion_n, int) or confusion_n < 0):
        raise ConfigError("report.confusion_n must be a non-negative integer")

    tabs = _tabs_from_data(raw.get("data"), Path(base_dir))
    if tabs and len(tabs) != n_sets:
        raise ConfigError(f"{variant} model needs {n_sets} dataset(s), config provides {len(tabs)}")
    return FitConfig(variant, priors, sampler, ppv_convention, classifier, prevalence, confusion_n, tabs, raw)


def _tabs_from_data(data, base: Path) -> list[CrossTab]:
    if data is None:
        return []
    if not isinstance(data, dict) or len(data.keys() & {"tabs", "predictions"}) != 1 or data.keys() - {"tabs", "predictions"}:
        raise ConfigError("'data' must hold exactly one of 'tabs' or 'predictions'")
    if "tabs" in data:
        try:
            return [CrossTab(*t) for t in data["tabs"]]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad cross-tab in config: {exc}") from exc
    tabs = []
    for entry in data["predictions"]:
        if not isinstance(entry, dict) or set(entry) != {"a", "b"}:
            raise ConfigError("each predictions entry needs exactly 'a' and 'b' file paths")
        tabs.append(crosstab(base / entry["a"], base / entry["b"]))
    return tabs


def load_config(path) -> FitConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    return parse_config(raw, Path(path).parent)


def seed_from_env() -> int | None:
    value = os.environ.get(SEED_ENV)
    if value is None or value.strip() == "":
        return None
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {value!r}") from exc
