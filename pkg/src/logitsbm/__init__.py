"""Bayesian community detection with a node-corrected logistic blockmodel.

Submodules
----------
graph        edge-list and label-file ingestion, :class:`Graph`
labels       canonical relabeling, partition distances, error rates
design       regression design for the edge log-odds, rank checks
draws        Polya-Gamma, truncated normal and Dirichlet variates
gibbs        posterior sampler, mode finding, restarts
estimators   centroid, Binder and MAP estimates, posterior summaries
synth        spike, blockmodel and power-law benchmark generators
traceio      on-disk layout of sampler output
cli          ``logitsbm`` command-line program
"""
from .exceptions import DataError, NumericalError
from .graph import Graph, load_edge_list, load_labels
from .labels import binder, error_rate, hamming, remap
from .gibbs import Hyperparams, ModelParams, ChainState, SampleTrace, fit_chains, gibbs_run, multi_restart_init
from .estimators import binder_estimate, centroid_estimate, map_estimate

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "NumericalError",
    "Graph",
    "load_edge_list",
    "load_labels",
    "remap",
    "hamming",
    "binder",
    "error_rate",
    "Hyperparams",
    "ModelParams",
    "ChainState",
    "SampleTrace",
    "gibbs_run",
    "multi_restart_init",
    "fit_chains",
    "centroid_estimate",
    "binder_estimate",
    "map_estimate",
]
