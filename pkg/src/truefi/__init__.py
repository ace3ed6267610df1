"""Extraction of true frequent itemsets with family-wise error rate control."""

from .baselines import binomial_tail_log, bonferroni_method, holdout_method
from .dataset import (
    GroundTruthModel,
    TransactionDataset,
    d_index,
    enlarge,
    length_profile,
    parse_fimi,
    random_split,
    read_fimi,
    sample_from_model,
    write_fimi,
)
from .errors import (
    InfeasibleThresholdError,
    ParameterError,
    ResourceLimitError,
    TruefiError,
)
from .fim import ItemsetCollection, frequency_band, mine_frequent, negative_border
from .harness import ExperimentConfig, run_experiment, true_frequent_itemsets
from .sukp import evc_bound_from_sukp, solve_exact, solve_exact_antichain, vc_bound_from_sukp
from .tfi import TfiConfig, method1, method2, split_delta
from .vcbounds import epsilon_evc, epsilon_vc

__version__ = "0.1.0"
