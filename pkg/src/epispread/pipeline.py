"""End-to-end experiment orchestration.

The estimation task: given the infective count observed along an epidemic
trajectory, predict the susceptible count, then plug the prediction into
beta * x1^m1 * x2^m2 to estimate the rate of spread.  The estimator is a
cooperative ensemble: the standardized (infective, susceptible) pairs are
k-means clustered, one small network is trained per cluster, and at
prediction time the input is routed to the cluster whose centroid's
infective coordinate is nearest.  Polynomial regressions trained on the same
standardized data serve as baselines.

Everything downstream of a master seed is deterministic: integration,
splitting, clustering, weight initialization and epoch shuffling all derive
from it, so repeated runs produce byte-identical reports.
"""

import logging
import os
from dataclasses import dataclass, replace

import numpy as np

from .clustering import ClusterModel, StandardizationParams, kmeans, select_k, standardize
from .errors import TooFewSamples
from .integrate import integrate
from .neuralnet import MlpConfig, TrainConfig, forward, init_model, load_model, save_model, train
from .regression import PolyModel, fit_poly, predict_poly

__all__ = [
    "Dataset",
    "CooperativeModel",
    "PolyPredictor",
    "MethodScore",
    "EvalReport",
    "RateReport",
    "ExperimentResult",
    "generate_dataset",
    "dataset_from_trajectory",
    "split",
    "train_cooperative",
    "predict_cooperative",
    "estimate_rate_series",
    "evaluate",
    "build_eval_report",
    "run_experiment",
    "write_dataset_csv",
    "read_dataset_csv",
    "write_eval_csv",
    "write_rate_csv",
]

log = logging.getLogger(__name__)

DEFAULT_K_CANDIDATES = (3, 4, 5)
MIN_CLUSTER_SIZE = 6


@dataclass
class Dataset:
    """(infective -> susceptible) pairs in raw and standardized units."""

    x2_raw: np.ndarray
    x1_raw: np.ndarray
    x2_std: np.ndarray
    x1_std: np.ndarray
    x2_scaler: StandardizationParams
    x1_scaler: StandardizationParams
    provenance: dict
    times: np.ndarray | None = None

    def __len__(self):
        return len(self.x2_raw)


def dataset_from_trajectory(traj, provenance=None):
    """Extract (x2 -> x1) pairs from a trajectory and standardize both."""
    x2_std, x2_scaler = standardize(traj.x2)
    x1_std, x1_scaler = standardize(traj.x1)
    return Dataset(
        x2_raw=traj.x2.copy(),
        x1_raw=traj.x1.copy(),
        x2_std=x2_std,
        x1_std=x1_std,
        x2_scaler=x2_scaler,
        x1_scaler=x1_scaler,
        provenance=dict(provenance or {}),
        times=traj.times.copy(),
    )


def generate_dataset(params, init, iconfig):
    """Integrate the model and turn the samples into a training dataset."""
    traj = integrate(params, init, iconfig)
    provenance = {"params": params, "init": init, "integration": iconfig}
    return dataset_from_trajectory(traj, provenance)


def _take(ds, idx):
    return Dataset(
        x2_raw=ds.x2_raw[idx],
        x1_raw=ds.x1_raw[idx],
        x2_std=ds.x2_std[idx],
        x1_std=ds.x1_std[idx],
        x2_scaler=ds.x2_scaler,
        x1_scaler=ds.x1_scaler,
        provenance=ds.provenance,
        times=None if ds.times is None else ds.times[idx],
    )


def split(dataset, train_fraction, seed):
    """Seeded random partition into disjoint, exhaustive train/test sets."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    n = len(dataset)
    n_train = int(n * train_fraction)
    if n_train == 0 or n_train == n:
        raise TooFewSamples(
            f"cannot split {n} samples with train_fraction={train_fraction}"
        )
    perm = np.random.default_rng(seed).permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return _take(dataset, train_idx), _take(dataset, test_idx)


@dataclass
class CooperativeModel:
    """Per-cluster networks with nearest-centroid routing on the input.

    Clustering used both coordinates, but routing at prediction time can only
    see the infective value, so only the centroids' input coordinate takes
    part in routing; ties go to the lowest cluster index.
    """

    clusters: ClusterModel
    networks: list
    x2_scaler: StandardizationParams
    x1_scaler: StandardizationParams

    method_label = "cooperative_nn"

    @property
    def k(self):
        return len(self.networks)

    def route(self, z_inputs):
        """Cluster index for each standardized input value."""
        z = np.atleast_1d(np.asarray(z_inputs, dtype=np.float64))
        return np.abs(z[:, None] - self.clusters.centroids[None, :, 0]).argmin(axis=1)

    def predict_standardized(self, z_inputs):
        """Network outputs in standardized target space."""
        z = np.atleast_1d(np.asarray(z_inputs, dtype=np.float64))
        routes = self.route(z)
        out = np.empty_like(z)
        for j in range(self.k):
            mask = routes == j
            if mask.any():
                out[mask] = forward(self.networks[j], z[mask])
        return out

    def predict_susceptible(self, x2_values):
        """Raw-unit susceptible estimate for raw-unit infective input."""
        x2_values = np.asarray(x2_values, dtype=np.float64)
        scalar = x2_values.ndim == 0
        z = self.x2_scaler.apply(np.atleast_1d(x2_values))
        out = self.x1_scaler.invert(self.predict_standardized(z))
        return float(out[0]) if scalar else out

    def save(self, dirpath, meta=None):
        """Write the model directory: meta, scalers, centroids, one network
        file per cluster."""
        os.makedirs(dirpath, exist_ok=True)
        with open(os.path.join(dirpath, "meta.txt"), "w") as fh:
            fh.write(f"k = {self.k}\n")
            for key, value in (meta or {}).items():
                fh.write(f"{key} = {value}\n")
        with open(os.path.join(dirpath, "scalers.txt"), "w") as fh:
            fh.write(f"x2_mean = {self.x2_scaler.mean[0]:.17g}\n")
            fh.write(f"x2_std = {self.x2_scaler.std[0]:.17g}\n")
            fh.write(f"x1_mean = {self.x1_scaler.mean[0]:.17g}\n")
            fh.write(f"x1_std = {self.x1_scaler.std[0]:.17g}\n")
        with open(os.path.join(dirpath, "centroids.txt"), "w") as fh:
            for row in self.clusters.centroids:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
        for j, net in enumerate(self.networks):
            save_model(net, os.path.join(dirpath, f"net_{j}.txt"))

    @classmethod
    def load(cls, dirpath):
        """Read a model directory back; returns (model, meta dict)."""
        meta = {}
        with open(os.path.join(dirpath, "meta.txt")) as fh:
            for line in fh:
                if "=" in line:
                    key, _, value = line.partition("=")
                    meta[key.strip()] = value.strip()
        with open(os.path.join(dirpath, "scalers.txt")) as fh:
            sc = {}
            for line in fh:
                key, _, value = line.partition("=")
                sc[key.strip()] = float(value)
        centroids = np.loadtxt(os.path.join(dirpath, "centroids.txt"), ndmin=2)
        k = int(meta["k"])
        networks = [
            load_model(os.path.join(dirpath, f"net_{j}.txt")) for j in range(k)
        ]
        clusters = ClusterModel(
            k=k,
            centroids=centroids,
            assignments=np.empty(0, dtype=np.intp),
            objective=float("nan"),
        )
        model = cls(
            clusters=clusters,
            networks=networks,
            x2_scaler=StandardizationParams(
                mean=np.array([sc["x2_mean"]]), std=np.array([sc["x2_std"]])
            ),
            x1_scaler=StandardizationParams(
                mean=np.array([sc["x1_mean"]]), std=np.array([sc["x1_std"]])
            ),
        )
        return model, meta


def _merge_small_clusters(data, centroids, assignments, min_size):
    """Fold clusters below ``min_size`` points into their nearest neighbour.

    The merged partition is the training assignment; it is not re-balanced
    afterwards, so points keep their (possibly no longer nearest) label.
    """
    centroids = centroids.copy()
    assignments = assignments.copy()
    while centroids.shape[0] > 1:
        sizes = np.bincount(assignments, minlength=centroids.shape[0])
        small = np.flatnonzero(sizes < min_size)
        if small.size == 0:
            break
        j = int(small[np.argmin(sizes[small])])
        dist = ((centroids - centroids[j]) ** 2).sum(axis=1)
        dist[j] = np.inf
        target = int(dist.argmin())
        log.warning(
            "cluster %d has %d points (< %d); merged into cluster %d "
            "(ClusterTooSmall)", j, sizes[j], min_size, target,
        )
        assignments[assignments == j] = target
        assignments[assignments > j] -= 1
        centroids = centroids[np.arange(centroids.shape[0]) != j]
        tgt = target - 1 if target > j else target
        centroids[tgt] = data[assignments == tgt].mean(axis=0)
    return centroids, assignments


def train_cooperative(train_set, k, seed, tconfig=None, min_cluster_size=MIN_CLUSTER_SIZE):
    """Cluster the training pairs and fit one network per cluster.

    ``k`` may be an integer or "auto", which selects from {3, 4, 5} by mean
    silhouette.  Clusters smaller than ``min_cluster_size`` are merged into
    their nearest neighbour (there are more free parameters than that in
    each network).  Per-cluster weight-init and shuffle seeds are derived
    from ``seed`` and the cluster index, so the result is independent of
    training order.
    """
    tconfig = tconfig or TrainConfig()
    data = np.column_stack([train_set.x2_std, train_set.x1_std])
    if k == "auto" or k is None:
        k, table = select_k(data, DEFAULT_K_CANDIDATES, seed)
        log.info("silhouette selection chose k=%d from %s", k,
                 [(row.k, round(row.mean_silhouette, 4)) for row in table])
    cm = kmeans(data, int(k), seed)
    centroids, assignments = _merge_small_clusters(
        data, cm.centroids, cm.assignments, min_cluster_size
    )
    k_eff = centroids.shape[0]
    d2 = ((data[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    objective = float(d2[np.arange(len(data)), assignments].sum())
    scaler2d = StandardizationParams(
        mean=np.array([train_set.x2_scaler.mean[0], train_set.x1_scaler.mean[0]]),
        std=np.array([train_set.x2_scaler.std[0], train_set.x1_scaler.std[0]]),
    )
    clusters = ClusterModel(
        k=k_eff,
        centroids=centroids,
        assignments=assignments,
        objective=objective,
        standardization=scaler2d,
    )
    networks = []
    for j in range(k_eff):
        mask = assignments == j
        model = init_model(MlpConfig(seed=[seed, j, 0]))
        cluster_tconfig = replace(tconfig, shuffle_seed=[seed, j, 1])
        trained, _ = train(
            model, train_set.x2_std[mask], train_set.x1_std[mask], cluster_tconfig
        )
        log.info(
            "cluster %d: %d points, %d epochs, final mse %.3g",
            j, int(mask.sum()), trained.epochs_trained, trained.final_mse,
        )
        networks.append(trained)
    return CooperativeModel(
        clusters=clusters,
        networks=networks,
        x2_scaler=train_set.x2_scaler,
        x1_scaler=train_set.x1_scaler,
    )


def predict_cooperative(model, infective_raw):
    """Susceptible estimate in raw units for raw infective input."""
    return model.predict_susceptible(infective_raw)


@dataclass
class PolyPredictor:
    """Polynomial baseline wrapped with the dataset's standardization, so it
    consumes and produces raw units like the cooperative model."""

    poly: PolyModel
    x2_scaler: StandardizationParams
    x1_scaler: StandardizationParams

    @property
    def method_label(self):
        return f"poly_degree_{self.poly.degree}"

    def predict_standardized(self, z_inputs):
        return predict_poly(self.poly, np.atleast_1d(z_inputs))

    def predict_susceptible(self, x2_values):
        x2_values = np.asarray(x2_values, dtype=np.float64)
        scalar = x2_values.ndim == 0
        z = self.x2_scaler.apply(np.atleast_1d(x2_values))
        out = self.x1_scaler.invert(self.predict_standardized(z))
        return float(out[0]) if scalar else out


def fit_poly_baseline(train_set, degree):
    """Least-squares polynomial on the standardized training pairs."""
    poly = fit_poly(train_set.x2_std, train_set.x1_std, degree)
    return PolyPredictor(
        poly=poly,
        x2_scaler=train_set.x2_scaler,
        x1_scaler=train_set.x1_scaler,
    )


@dataclass
class MethodScore:
    """MSE of one method on one dataset, in raw and standardized units."""

    mse_raw: float
    mse_std: float
    n: int


def evaluate(predictors, dataset):
    """MSE per method over identical pairs; returns {name: MethodScore}."""
    out = {}
    scale2 = float(dataset.x1_scaler.std[0]) ** 2
    for name, predictor in predictors.items():
        pred = predictor.predict_susceptible(dataset.x2_raw)
        mse_raw = float(np.mean((pred - dataset.x1_raw) ** 2))
        out[name] = MethodScore(
            mse_raw=mse_raw, mse_std=mse_raw / scale2, n=len(dataset)
        )
    return out


@dataclass
class EvalReport:
    """Train and test MSEs per method plus sample counts."""

    train: dict
    test: dict
    n_train: int
    n_test: int


def build_eval_report(predictors, train_set, test_set):
    return EvalReport(
        train=evaluate(predictors, train_set),
        test=evaluate(predictors, test_set),
        n_train=len(train_set),
        n_test=len(test_set),
    )


@dataclass
class RateReport:
    """Actual vs estimated rate of spread along a trajectory.

    ``estimated`` and ``rmse`` are keyed by method label so several
    predictors can be reported against the same actual series.
    """

    times: np.ndarray
    actual: np.ndarray
    estimated: dict
    rmse: dict


def estimate_rate_series(params, traj, predictor, label=None):
    """Rate-of-spread series using predicted susceptibles.

    The actual rate uses the trajectory's true x1; the estimate substitutes
    the predictor's x1(x2).  Negative predictions are clamped to zero before
    exponentiation (and logged), since fractional powers of negative counts
    are meaningless.
    """
    label = label or getattr(predictor, "method_label", type(predictor).__name__)
    x1 = traj.x1
    x2 = traj.x2
    x2_term = np.power(x2, params.m2)
    actual = params.beta * np.power(x1, params.m1) * x2_term
    predicted = np.asarray(predictor.predict_susceptible(x2), dtype=np.float64)
    negative = predicted < 0.0
    if negative.any():
        log.warning("clamped %d negative susceptible predictions to zero",
                    int(negative.sum()))
        predicted = np.where(negative, 0.0, predicted)
    estimated = params.beta * np.power(predicted, params.m1) * x2_term
    rmse = float(np.sqrt(np.mean((estimated - actual) ** 2)))
    return RateReport(
        times=traj.times.copy(),
        actual=actual,
        estimated={label: estimated},
        rmse={label: rmse},
    )


def merge_rate_reports(reports):
    """Combine single-method rate reports computed on the same trajectory."""
    first = reports[0]
    merged = RateReport(
        times=first.times,
        actual=first.actual,
        estimated=dict(first.estimated),
        rmse=dict(first.rmse),
    )
    for rep in reports[1:]:
        merged.estimated.update(rep.estimated)
        merged.rmse.update(rep.rmse)
    return merged


@dataclass
class ExperimentResult:
    """Everything produced by one end-to-end run."""

    trajectory: object
    dataset: Dataset
    train_set: Dataset
    test_set: Dataset
    cooperative: CooperativeModel
    baselines: dict
    report: EvalReport
    rate: RateReport


def run_experiment(params, init, iconfig, seed, k=3, train_fraction=0.7,
                   tconfig=None, degrees=(1, 2)):
    """Full pipeline: simulate, split, train all methods, compare, rate."""
    traj = integrate(params, init, iconfig)
    dataset = dataset_from_trajectory(
        traj, {"params": params, "init": init, "integration": iconfig}
    )
    train_set, test_set = split(dataset, train_fraction, seed)
    cooperative = train_cooperative(train_set, k, seed, tconfig)
    baselines = {}
    predictors = {cooperative.method_label: cooperative}
    for d in degrees:
        baseline = fit_poly_baseline(train_set, d)
        baselines[d] = baseline
        predictors[baseline.method_label] = baseline
    report = build_eval_report(predictors, train_set, test_set)
    rate = merge_rate_reports(
        [estimate_rate_series(params, traj, p) for p in predictors.values()]
    )
    return ExperimentResult(
        trajectory=traj,
        dataset=dataset,
        train_set=train_set,
        test_set=test_set,
        cooperative=cooperative,
        baselines=baselines,
        report=report,
        rate=rate,
    )


def write_dataset_csv(dataset, path):
    """CSV `x2_raw,x1_raw,x2_std,x1_std` at full precision."""
    with open(path, "w") as fh:
        fh.write("x2_raw,x1_raw,x2_std,x1_std\n")
        for row in zip(dataset.x2_raw, dataset.x1_raw,
                       dataset.x2_std, dataset.x1_std):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_dataset_csv(path):
    """Rebuild a Dataset from the raw columns of a dataset CSV.

    Standardization is recomputed from the raw values; 17-significant-digit
    output makes that reproduce the written standardized columns exactly.
    """
    raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x2_std, x2_scaler = standardize(raw[:, 0])
    x1_std, x1_scaler = standardize(raw[:, 1])
    return Dataset(
        x2_raw=raw[:, 0].copy(),
        x1_raw=raw[:, 1].copy(),
        x2_std=x2_std,
        x1_std=x1_std,
        x2_scaler=x2_scaler,
        x1_scaler=x1_scaler,
        provenance={"source": str(path)},
    )


def write_eval_csv(report, path):
    """CSV `method,train_mse,test_mse` (raw units)."""
    with open(path, "w") as fh:
        fh.write("method,train_mse,test_mse\n")
        for name in report.train:
            fh.write(
                f"{name},{report.train[name].mse_raw:.17g},"
                f"{report.test[name].mse_raw:.17g}\n"
            )


def write_rate_csv(report, path, method=None):
    """CSV `t,actual,estimated` for one method of a rate report."""
    if method is None:
        if len(report.estimated) != 1:
            raise ValueError(
                f"report holds {sorted(report.estimated)}; pass method="
            )
        method = next(iter(report.estimated))
    est = report.estimated[method]
    with open(path, "w") as fh:
        fh.write("t,actual,estimated\n")
        for t, a, e in zip(report.times, report.actual, est):
            fh.write(f"{t:.17g},{a:.17g},{e:.17g}\n")
