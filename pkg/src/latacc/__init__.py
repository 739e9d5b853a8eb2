"""Accuracy of binary classifiers on unlabeled data via Bayesian latent-class models."""

__version__ = "0.1.0"

from .diagnostics import DiagnosticsReport, diagnose, effective_sample_size, split_rhat
from .errors import (ConfigError, DataError, ElicitationError, GridError, IdentifiabilityError,
                     LataccError, SamplerStateError)
from .gibbs import LatentSplit, SamplerConfig, run_chain, sample_latents, update_parameters
from .model import (ONE_DATASET, TWO_DATASETS, CellProbs, CrossTab, ParamState, cell_probs,
                    joint_log_posterior, log_likelihood)
from .oracle import grid_posterior_means
from .posterior import (ChainSet, ConfusionMatrix, PosteriorSummary, confusion_matrix,
                        derived_chains, summarize)
from .priors import BetaParams, PriorSet, beta_tail, elicit_beta
