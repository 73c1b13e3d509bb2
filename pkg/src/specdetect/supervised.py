"""Supervised human-vs-model classification of spectrum feature vectors.

A :class:`Pipeline` chains a scaler, a k-best feature selector (one-way
ANOVA F-score), and one of four classifiers, all implemented here with
numpy: logistic regression (l1/l2), a linear SVM (squared hinge), k-nearest
neighbors, and complement naive Bayes.  Evaluation is seeded, stratified
k-fold cross-validation with a grid search; everything is deterministic
given the seed.

Tie-breaking rules (for determinism): points exactly on a decision boundary
get label 0; kNN distance ties go to the lower sample index; grid ties go to
the earlier config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError

SCALERS = ("minmax", "zscore", "robust")
CLASSIFIERS = ("logreg", "knn", "naive_bayes", "linear_svm")

GRAD_TOL = 1e-6
MAX_ITER = 10_000

PIPELINE_FORMAT = "specdetect-pipeline"
PIPELINE_VERSION = 1

# hyperparameter grid for the implemented classifiers
DEFAULT_GRID = {
    "scalers": ["minmax", "zscore", "robust"],
    "k_best": [50, 80, 100, 120, 150, 200, 250, 300, 400, 500],
    "classifiers": {
        "logreg": {"penalty": ["l1", "l2"], "C": [1, 2, 10]},
        "linear_svm": {"C": [1, 2, 10]},
        "knn": {"n_neighbors": [3, 5, 7, 9]},
        "naive_bayes": {"alpha": [0.5, 1, 2]},
    },
}


@dataclass(frozen=True)
class Pipeline:
    """Scaler + k-best selector + classifier, possibly fitted."""

    scaler: str
    k_best: int
    classifier: str
    hyperparams: dict = field(default_factory=dict)
    fitted_state: dict | None = None

    def __post_init__(self):
        if self.scaler not in SCALERS:
            raise ValidationError(f"unknown scaler {self.scaler!r}")
        if self.classifier not in CLASSIFIERS:
            raise ValidationError(f"unknown classifier {self.classifier!r}")
        if self.k_best < 1:
            raise ValidationError(f"k_best must be >= 1, got {self.k_best}")

    @property
    def is_fitted(self) -> bool:
        return self.fitted_state is not None

    def describe(self) -> dict:
        return {
            "scaler": self.scaler,
            "k_best": self.k_best,
            "classifier": self.classifier,
            "hyperparams": dict(self.hyperparams),
        }


@dataclass(frozen=True)
class EvalReport:
    """Cross-validation outcome: per-config table plus the winning config."""

    per_fold_accuracy: tuple[float, ...]
    mean_accuracy: float
    best_config: dict
    grid_results: tuple[dict, ...]
    folds: int
    seed: int
    optimizer: dict

    def to_dict(self) -> dict:
        return {
            "per_fold_accuracy": list(self.per_fold_accuracy),
            "mean_accuracy": self.mean_accuracy,
            "best_config": self.best_config,
            "grid_results": [dict(r) for r in self.grid_results],
            "folds": self.folds,
            "seed": self.seed,
            "optimizer": dict(self.optimizer),
        }


# --- scalers ----------------------------------------------------------------


def _fit_scaler(name: str, X: np.ndarray) -> dict:
    if name == "minmax":
        return {"min": X.min(axis=0), "max": X.max(axis=0)}
    if name == "zscore":
        return {"mean": X.mean(axis=0), "std": X.std(axis=0)}
    if name == "robust":
        q25, median, q75 = np.percentile(X, [25, 50, 75], axis=0)
        return {"median": median, "iqr": q75 - q25}
    raise ValidationError(f"unknown scaler {name!r}")


def _apply_scaler(name: str, params: dict, X: np.ndarray) -> np.ndarray:
    if name == "minmax":
        span = params["max"] - params["min"]
        scaled = np.where(span > 0, (X - params["min"]) / np.where(span > 0, span, 1.0), 0.0)
        return scaled
    if name == "zscore":
        std = params["std"]
        return np.where(std > 0, (X - params["mean"]) / np.where(std > 0, std, 1.0), 0.0)
    if name == "robust":
        iqr = params["iqr"]
        return np.where(iqr > 0, (X - params["median"]) / np.where(iqr > 0, iqr, 1.0), 0.0)
    raise ValidationError(f"unknown scaler {name!r}")


# --- feature selection -------------------------------------------------------


def anova_f(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """One-way ANOVA F-statistic per feature (between over within variance)."""
    classes = np.unique(y)
    n, _ = X.shape
    grand = X.mean(axis=0)
    between = np.zeros(X.shape[1])
    within = np.zeros(X.shape[1])
    for c in classes:
        Xc = X[y == c]
        between += Xc.shape[0] * (Xc.mean(axis=0) - grand) ** 2
        within += ((Xc - Xc.mean(axis=0)) ** 2).sum(axis=0)
    msb = between / (len(classes) - 1)
    msw = within / (n - len(classes))
    with np.errstate(divide="ignore", invalid="ignore"):
        f = msb / msw
    f = np.where(msw > 0, f, np.where(msb > 0, np.inf, 0.0))
    return f


def select_k_best(X: np.ndarray, y: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k features with the largest F-score, ties by index."""
    f = anova_f(X, y)
    order = np.argsort(-f, kind="stable")
    return np.sort(order[:k])


# --- classifiers -------------------------------------------------------------


def _spectral_bound(Xt: np.ndarray) -> float:
    # largest singular value squared of [X, 1]
    return float(np.linalg.norm(Xt, ord=2) ** 2)


def _fista(grad, prox, theta0, step, tol=GRAD_TOL, max_iter=MAX_ITER):
    """Accelerated proximal gradient descent with adaptive restart.

    ``prox`` may be None for smooth objectives.  The momentum sequence is
    restarted whenever it points against the latest step (gradient-scheme
    restart), which recovers fast convergence on strongly convex problems.
    Convergence is declared when the proximal-gradient norm falls below
    ``tol``.  Returns the solution and the iteration count.
    """
    theta = theta0.copy()
    momentum = theta0.copy()
    t_acc = 1.0
    for iteration in range(1, max_iter + 1):
        g = grad(momentum)
        candidate = momentum - step * g
        if prox is not None:
            candidate = prox(candidate, step)
        residual = np.linalg.norm(momentum - candidate) / step
        if residual < tol:
            return candidate, iteration
        if np.dot(momentum - candidate, candidate - theta) > 0.0:
            # momentum is fighting the descent direction: restart it
            t_acc = 1.0
            momentum = candidate
        else:
            t_next = (1.0 + np.sqrt(1.0 + 4.0 * t_acc * t_acc)) / 2.0
            momentum = candidate + ((t_acc - 1.0) / t_next) * (candidate - theta)
            t_acc = t_next
        theta = candidate
    return theta, max_iter


def _newton(objective, grad, hess, theta0, tol=GRAD_TOL, max_iter=MAX_ITER):
    """Damped Newton descent with Armijo backtracking; fully deterministic."""
    theta = theta0.copy()
    identity = np.eye(theta.size)
    for iteration in range(1, max_iter + 1):
        g = grad(theta)
        if np.linalg.norm(g) < tol:
            return theta, iteration
        h = hess(theta) + 1e-12 * identity
        try:
            direction = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            direction = g
        slope = float(g @ direction)
        if slope <= 0.0:
            direction, slope = g, float(g @ g)
        f0 = objective(theta)
        step = 1.0
        candidate = theta - direction
        while step > 1e-12:
            candidate = theta - step * direction
            if objective(candidate) <= f0 - 1e-4 * step * slope:
                break
            step *= 0.5
        theta = candidate
    return theta, max_iter


def _fit_logreg(X: np.ndarray, y_signed: np.ndarray, penalty: str, C: float):
    n, d = X.shape
    Xt = np.hstack([X, np.ones((n, 1))])
    ridge = np.ones(d + 1)
    ridge[-1] = 0.0  # bias unpenalized

    def grad(theta):
        z = Xt @ theta
        # d/dz log(1 + exp(-y z)) = -y * sigmoid(-y z)
        s = 1.0 / (1.0 + np.exp(np.clip(y_signed * z, -500, 500)))
        g = C * (Xt.T @ (-y_signed * s))
        if penalty == "l2":
            g = g + ridge * theta
        return g

    if penalty == "l2":
        def objective(theta):
            z = Xt @ theta
            return C * float(np.logaddexp(0.0, -y_signed * z).sum()) \
                + 0.5 * float((ridge * theta) @ theta)

        def hess(theta):
            z = Xt @ theta
            s = 1.0 / (1.0 + np.exp(np.clip(y_signed * z, -500, 500)))
            weights = C * s * (1.0 - s)
            return (Xt.T * weights) @ Xt + np.diag(ridge)

        theta, n_iter = _newton(objective, grad, hess, np.zeros(d + 1))
    else:
        lipschitz = 0.25 * C * _spectral_bound(Xt)
        step = 1.0 / max(lipschitz, 1e-12)

        def prox(theta, eta):
            out = np.sign(theta) * np.maximum(np.abs(theta) - eta, 0.0)
            out[-1] = theta[-1]  # bias unpenalized
            return out

        theta, n_iter = _fista(grad, prox, np.zeros(d + 1), step)
    return {"w": theta[:-1], "b": float(theta[-1]), "n_iter": n_iter}


def _fit_linear_svm(X: np.ndarray, y_signed: np.ndarray, C: float):
    n, d = X.shape
    Xt = np.hstack([X, np.ones((n, 1))])
    ridge = np.ones(d + 1)
    ridge[-1] = 0.0

    def objective(theta):
        margin = np.maximum(1.0 - y_signed * (Xt @ theta), 0.0)
        return 0.5 * float((ridge * theta) @ theta) + C * float(margin @ margin)

    def grad(theta):
        margin = np.maximum(1.0 - y_signed * (Xt @ theta), 0.0)
        return ridge * theta - 2.0 * C * (Xt.T @ (y_signed * margin))

    def hess(theta):
        # piecewise-quadratic objective: curvature from the active margins
        active = (1.0 - y_signed * (Xt @ theta)) > 0.0
        Xa = Xt[active]
        return np.diag(ridge) + 2.0 * C * (Xa.T @ Xa)

    theta, n_iter = _newton(objective, grad, hess, np.zeros(d + 1))
    return {"w": theta[:-1], "b": float(theta[-1]), "n_iter": n_iter}


def _fit_complement_nb(X: np.ndarray, y: np.ndarray, alpha: float):
    if alpha <= 0:
        raise ValidationError(f"naive_bayes alpha must be > 0, got {alpha}")
    # CNB needs non-negative features; shift each feature by its training
    # minimum (test values below it are clipped to zero).  A unit reference
    # column is appended so the feature-proportion geometry stays informative
    # even when the selector keeps very few features.
    shift = X.min(axis=0)
    Xs = np.hstack([X - shift, np.ones((X.shape[0], 1))])
    log_prob = []
    for c in (0, 1):
        comp = alpha + Xs[y != c].sum(axis=0)
        log_prob.append(np.log(comp / comp.sum()))
    return {"shift": shift, "neg_log_prob": -np.stack(log_prob)}


def _fit_classifier(name: str, hyperparams: dict, X: np.ndarray, y: np.ndarray) -> dict:
    y_signed = np.where(y == 1, 1.0, -1.0)
    if name == "logreg":
        penalty = hyperparams.get("penalty", "l2")
        if penalty not in ("l1", "l2"):
            raise ValidationError(f"logreg penalty must be l1 or l2, got {penalty!r}")
        return _fit_logreg(X, y_signed, penalty, float(hyperparams.get("C", 1.0)))
    if name == "linear_svm":
        return _fit_linear_svm(X, y_signed, float(hyperparams.get("C", 1.0)))
    if name == "knn":
        k = int(hyperparams.get("n_neighbors", 5))
        if k < 1 or k > X.shape[0]:
            raise ValidationError(f"n_neighbors {k} out of range for {X.shape[0]} samples")
        return {"X": X.copy(), "y": y.copy(), "n_neighbors": k}
    if name == "naive_bayes":
        return _fit_complement_nb(X, y, float(hyperparams.get("alpha", 1.0)))
    raise ValidationError(f"unknown classifier {name!r}")


def _predict_classifier(name: str, state: dict, X: np.ndarray) -> np.ndarray:
    if name in ("logreg", "linear_svm"):
        z = X @ state["w"] + state["b"]
        return (z > 0).astype(int)  # boundary (z == 0) -> label 0
    if name == "knn":
        train, labels, k = state["X"], state["y"], state["n_neighbors"]
        preds = np.empty(X.shape[0], dtype=int)
        for i, row in enumerate(X):
            dist = np.sqrt(((train - row) ** 2).sum(axis=1))
            order = np.lexsort((np.arange(train.shape[0]), dist))
            votes = labels[order[:k]]
            ones = int(votes.sum())
            preds[i] = 1 if ones * 2 > k else 0
        return preds
    if name == "naive_bayes":
        Xs = np.clip(X - state["shift"], 0.0, None)
        Xs = np.hstack([Xs, np.ones((Xs.shape[0], 1))])
        scores = Xs @ state["neg_log_prob"].T
        return np.argmax(scores, axis=1).astype(int)  # tie -> class 0
    raise ValidationError(f"unknown classifier {name!r}")


# --- pipeline ----------------------------------------------------------------


def fit(pipeline: Pipeline, X, y) -> Pipeline:
    """Learn scaler statistics, the k-best selection, and classifier weights.

    All statistics come from ``(X, y)`` only, so fitting on training folds
    cannot leak information from held-out folds.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2:
        raise ValidationError("X must be a 2-D feature matrix")
    if X.shape[0] != y.shape[0]:
        raise ValidationError("X and y disagree on sample count")
    if not np.all(np.isfinite(X)):
        raise ValidationError("X contains non-finite values")
    classes, counts = np.unique(y, return_counts=True)
    if not np.all(np.isin(classes, (0, 1))):
        raise ValidationError("labels must be 0 (human) or 1 (model)")
    if len(classes) < 2:
        raise ValidationError("training data contains a single class")
    if counts.min() < 2:
        raise ValidationError("need at least 2 samples per class")
    if pipeline.k_best > X.shape[1]:
        raise ValidationError(
            f"k_best {pipeline.k_best} exceeds feature dimension {X.shape[1]}"
        )

    scaler_params = _fit_scaler(pipeline.scaler, X)
    Xs = _apply_scaler(pipeline.scaler, scaler_params, X)
    selected = select_k_best(Xs, y, pipeline.k_best)
    clf_state = _fit_classifier(pipeline.classifier, pipeline.hyperparams,
                                Xs[:, selected], y)
    state = {
        "n_features_in": X.shape[1],
        "scaler_params": scaler_params,
        "selected": selected,
        "classifier_state": clf_state,
    }
    return replace(pipeline, fitted_state=state)


def predict(pipeline: Pipeline, X) -> np.ndarray:
    """Deterministic 0/1 labels for a fitted pipeline."""
    if not pipeline.is_fitted:
        raise ValidationError("pipeline is not fitted")
    X = np.asarray(X, dtype=float)
    state = pipeline.fitted_state
    if X.ndim != 2 or X.shape[1] != state["n_features_in"]:
        raise ValidationError(
            f"expected {state['n_features_in']} columns, got {X.shape}"
        )
    Xs = _apply_scaler(pipeline.scaler, state["scaler_params"], X)
    return _predict_classifier(
        pipeline.classifier, state["classifier_state"], Xs[:, state["selected"]]
    )


# --- cross-validation --------------------------------------------------------


def stratified_folds(y: np.ndarray, folds: int, seed: int) -> list[np.ndarray]:
    """Seeded stratified fold assignment; class ratios match within 1 sample."""
    if folds < 2:
        raise ValidationError(f"folds must be >= 2, got {folds}")
    y = np.asarray(y, dtype=int)
    rng = np.random.default_rng(seed)
    assignment = np.empty(y.shape[0], dtype=int)
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if idx.size < folds:
            raise ValidationError(
                f"class {c} has {idx.size} samples, fewer than {folds} folds"
            )
        rng.shuffle(idx)
        assignment[idx] = np.arange(idx.size) % folds
    return [np.flatnonzero(assignment == f) for f in range(folds)]


def expand_grid(grid: dict, n_features: int) -> list[Pipeline]:
    """Expand a grid description into concrete pipeline configs.

    ``k_best`` values above the feature dimension are dropped (the dimension
    itself is substituted if none survive).  Order is deterministic: scaler,
    then k, then classifier, then hyperparameters.
    """
    scalers = grid.get("scalers", DEFAULT_GRID["scalers"])
    ks = [k for k in grid.get("k_best", DEFAULT_GRID["k_best"]) if k <= n_features]
    if not ks:
        ks = [n_features]
    classifiers = grid.get("classifiers", DEFAULT_GRID["classifiers"])
    configs: list[Pipeline] = []
    for scaler in scalers:
        for k in ks:
            for clf_name, params in classifiers.items():
                names = list(params)
                combos = [{}]
                for name in names:
                    combos = [dict(c, **{name: v}) for c in combos for v in params[name]]
                for combo in combos:
                    configs.append(Pipeline(scaler=scaler, k_best=int(k),
                                            classifier=clf_name, hyperparams=combo))
    return configs


def cross_validate(X, y, grid=None, folds: int = 5, seed: int = 0) -> EvalReport:
    """Stratified k-fold grid search; reports mean accuracy per config.

    The best config is the highest mean accuracy, ties resolved to the
    earlier config in grid order.  Given the same seed the report is
    bit-identical across runs.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if grid is None:
        grid = expand_grid(DEFAULT_GRID, X.shape[1])
    elif isinstance(grid, dict):
        grid = expand_grid(grid, X.shape[1])
    if not grid:
        raise ValidationError("empty config grid")
    fold_indices = stratified_folds(y, folds, seed)

    grid_results = []
    best_idx = -1
    best_mean = -1.0
    best_folds: list[float] = []
    for config_idx, config in enumerate(grid):
        fold_acc: list[float] = []
        for test_idx in fold_indices:
            mask = np.ones(y.shape[0], dtype=bool)
            mask[test_idx] = False
            fitted = fit(config, X[mask], y[mask])
            predictions = predict(fitted, X[test_idx])
            fold_acc.append(float((predictions == y[test_idx]).mean()))
        mean_acc = float(np.mean(fold_acc))
        grid_results.append(
            {"config": config.describe(), "mean_accuracy": mean_acc,
             "per_fold_accuracy": fold_acc}
        )
        if mean_acc > best_mean:
            best_mean = mean_acc
            best_idx = config_idx
            best_folds = fold_acc
    return EvalReport(
        per_fold_accuracy=tuple(best_folds),
        mean_accuracy=best_mean,
        best_config=grid[best_idx].describe(),
        grid_results=tuple(grid_results),
        folds=folds,
        seed=seed,
        optimizer={"grad_tol": GRAD_TOL, "max_iter": MAX_ITER},
    )


# --- persistence -------------------------------------------------------------


def _array_to_list(value):
    if isinstance(value, np.ndarray):
        return {"__array__": value.tolist(), "dtype": str(value.dtype)}
    if isinstance(value, dict):
        return {k: _array_to_list(v) for k, v in value.items()}
    return value


def _list_to_array(value):
    if isinstance(value, dict):
        if "__array__" in value:
            return np.asarray(value["__array__"], dtype=value["dtype"])
        return {k: _list_to_array(v) for k, v in value.items()}
    return value


def save_pipeline(pipeline: Pipeline, path) -> None:
    """Persist a fitted pipeline as versioned JSON."""
    if not pipeline.is_fitted:
        raise ValidationError("refusing to save an unfitted pipeline")
    payload = {
        "format": PIPELINE_FORMAT,
        "version": PIPELINE_VERSION,
        "config": pipeline.describe(),
        "fitted_state": _array_to_list(pipeline.fitted_state),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True)
        handle.write("\n")


def load_pipeline(path) -> Pipeline:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if payload.get("format") != PIPELINE_FORMAT:
        raise ValidationError(f"{path}: not a {PIPELINE_FORMAT} file")
    if payload.get("version") != PIPELINE_VERSION:
        raise ValidationError(f"{path}: unsupported version {payload.get('version')}")
    config = payload["config"]
    return Pipeline(
        scaler=config["scaler"],
        k_best=int(config["k_best"]),
        classifier=config["classifier"],
        hyperparams=dict(config["hyperparams"]),
        fitted_state=_list_to_array(payload["fitted_state"]),
    )
