"""Epidemic simulation and neural estimation of the rate of spread.

The package simulates a susceptible/infective model with mutual-interference
exponents, clusters the resulting data, trains one small network per cluster
to predict susceptibles from infectives, and uses those predictions to
estimate the epidemic's rate of spread, with polynomial regression as the
baseline.  The numerical hot loops run in a compiled extension when built,
with an equivalent pure-Python fallback (`epispread.backend_name` tells which
one is active).
"""

from ._backend import BACKEND as backend_name
from .clustering import (
    ClusterModel,
    KCandidateScore,
    StandardizationParams,
    destandardize,
    kmeans,
    select_k,
    silhouette,
    standardize,
)
from .config import ExperimentConfig, builtin_config_path, load_config
from .errors import (
    DegenerateFeature,
    DivergenceFault,
    IntegrationFault,
    MalformedModel,
    RankDeficient,
    SingularityFault,
    TooFewSamples,
)
from .integrate import IntegrationConfig, Trajectory, integrate, integrate_transformed
from .model import (
    ControlSpec,
    ModelParams,
    RecoverySpec,
    State,
    TransformedState,
    from_transformed,
    is_admissible,
    rate_of_spread,
    rhs,
    to_transformed,
    transformed_rhs,
    validate_params,
)
from .neuralnet import (
    MlpConfig,
    MlpGradient,
    MlpModel,
    TrainConfig,
    deserialize,
    forward,
    gradient,
    init_model,
    load_model,
    save_model,
    serialize,
    train,
)
from .pipeline import (
    CooperativeModel,
    Dataset,
    EvalReport,
    ExperimentResult,
    MethodScore,
    PolyPredictor,
    RateReport,
    dataset_from_trajectory,
    estimate_rate_series,
    evaluate,
    fit_poly_baseline,
    generate_dataset,
    predict_cooperative,
    run_experiment,
    split,
    train_cooperative,
)
from .regression import PolyModel, fit_poly, predict_poly

__version__ = "0.1.0"
