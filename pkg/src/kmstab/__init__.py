"""Stable regions, initialization and stability estimation for k-means."""

from ._accel import BACKEND
from .certify import (
    Certificate,
    InitParams,
    RegionSpec,
    certify,
    certify_prism_k3,
    certify_square_k2,
    check_assumptions,
    compute_init_params,
    containment_oracle,
    impurity_bound,
    purity_radii,
)
from .datasets import MixtureModel, generate_dataset, named_model
from .gmm1d import GaussianMixture1D, Interval, h_function, normal_cdf, normal_quantile
from .kmeans import RunResult, assign, cost, lloyd_step, newton_step, run
from .population import population_fixed_point, population_update
from .seeding import InitScheme, min_diam_select, pruned_min_diam
from .stability import ProtocolSpec, StabilityReport, minimal_matching_distance, run_protocol

__version__ = "0.1.0"
