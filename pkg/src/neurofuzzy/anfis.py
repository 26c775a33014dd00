"""Five-layer forward pass and the two training algorithms.

Layers: fuzzification (membership degrees), rule firing (product t-norm),
normalisation, weighted first-order consequents, and the summing output.
Training is either plain backpropagation on every parameter or the hybrid
scheme: batch least squares for the consequents, then a gradient step on
the premise (membership) parameters.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NumericalError, ShapeError
from .fis import SugenoFis

log = logging.getLogger(__name__)

#: Lower bound on the sum of firing strengths.
FIRING_FLOOR = 1e-12
#: Ridge term, relative to the largest squared singular value of the design matrix.
RIDGE = 1e-9


@dataclass(frozen=True)
class ForwardTrace:
    """Per-layer outputs for a single input vector."""

    memberships: tuple[np.ndarray, ...]  # one array of degrees per input variable
    firing: np.ndarray
    normalized: np.ndarray
    weighted: np.ndarray
    output: float
    floored: bool = False


@dataclass
class _Layers:
    x: np.ndarray  # raw inputs (S, n)
    memberships: list[np.ndarray]  # per input: (S, k_j), on clamped inputs
    gathered: np.ndarray  # (S, R, n) degree each rule sees on each input
    firing: np.ndarray  # (S, R)
    total: np.ndarray  # (S,), floored
    floored: np.ndarray  # (S,) bool
    normalized: np.ndarray  # (S, R)
    rule_outputs: np.ndarray  # (S, R)
    output: np.ndarray  # (S,)


def _check_rows(fis: SugenoFis, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != fis.arity:
        raise ShapeError(f"model takes {fis.arity} inputs, got array of shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NumericalError("non-finite model input")
    return x


def _augment(x: np.ndarray) -> np.ndarray:
    return np.column_stack([x, np.ones(x.shape[0])])


def _layers(fis: SugenoFis, x: np.ndarray) -> _Layers:
    memberships = []
    for j, var in enumerate(fis.inputs):
        xj = np.clip(x[:, j], var.lo, var.hi)
        memberships.append(np.stack([mf.evaluate(xj) for mf in var.mfs], axis=1))
    gathered = np.stack(
        [memberships[j][:, fis.antecedents[:, j]] for j in range(fis.arity)], axis=2
    )
    firing = gathered.prod(axis=2)
    raw_total = firing.sum(axis=1)
    floored = raw_total < FIRING_FLOOR
    total = np.where(floored, FIRING_FLOOR, raw_total)
    normalized = firing / total[:, None]
    rule_outputs = _augment(x) @ fis.consequents.T
    output = (normalized * rule_outputs).sum(axis=1)
    return _Layers(x, memberships, gathered, firing, total, floored, normalized, rule_outputs, output)


def forward(fis: SugenoFis, x) -> tuple[float, ForwardTrace]:
    """Evaluate one input vector and keep every layer's output."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError(f"forward takes a single input vector, got shape {x.shape}")
    lay = _layers(fis, _check_rows(fis, x))
    trace = ForwardTrace(
        memberships=tuple(m[0] for m in lay.memberships),
        firing=lay.firing[0],
        normalized=lay.normalized[0],
        weighted=lay.normalized[0] * lay.rule_outputs[0],
        output=float(lay.output[0]),
        floored=bool(lay.floored[0]),
    )
    return trace.output, trace


def predict(fis: SugenoFis, x) -> np.ndarray:
    """Vectorised model output for a batch of input rows."""
    return _layers(fis, _check_rows(fis, x)).output


def _rmse(residual: np.ndarray) -> float:
    return math.sqrt(float(np.mean(residual**2)))


def training_rmse(fis: SugenoFis, data) -> float:
    return _rmse(data.targets - predict(fis, data.rows))


def design_matrix(fis: SugenoFis, x) -> np.ndarray:
    """Rows ``(wbar_1 * [x, 1], ..., wbar_R * [x, 1])`` for the consequent fit."""
    x = _check_rows(fis, x)
    return _design(_layers(fis, x))


def _design(lay: _Layers) -> np.ndarray:
    xa = _augment(lay.x)
    s, r = lay.normalized.shape
    return (lay.normalized[:, :, None] * xa[:, None, :]).reshape(s, r * xa.shape[1])


def solve_least_squares(a: np.ndarray, y: np.ndarray, ridge: float = RIDGE) -> tuple[np.ndarray, bool]:
    """Minimise ||a theta - y|| through an SVD of ``a``.

    Underdetermined or badly conditioned systems (smallest squared singular
    value below ``ridge * s_max**2``) get the Tikhonov solution with
    ``lambda = ridge * s_max**2``; the second return value flags that case.
    """
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(a.shape[1]), True
    lam = ridge * s[0] ** 2
    uty = u.T @ y
    deficient = a.shape[0] < a.shape[1] or s[-1] ** 2 < lam
    if deficient:
        coef = s / (s**2 + lam)
    else:
        coef = 1.0 / s
    return vt.T @ (coef * uty), bool(deficient)


@dataclass(frozen=True)
class LseResult:
    fis: SugenoFis
    rmse: float
    rank_deficient: bool
    design: np.ndarray
    residual: np.ndarray


def lse_consequents(fis: SugenoFis, data) -> LseResult:
    """Replace every consequent by the least-squares optimum for fixed premises."""
    lay = _layers(fis, _check_rows(fis, data.rows))
    a = _design(lay)
    y = np.asarray(data.targets, dtype=float)
    theta, deficient = solve_least_squares(a, y)
    if not np.all(np.isfinite(theta)):
        raise NumericalError("least-squares consequent fit produced non-finite values")
    residual = y - a @ theta
    updated = fis.with_consequents(theta.reshape(fis.n_rules, fis.arity + 1))
    return LseResult(updated, _rmse(residual), bool(deficient), a, residual)


def _gradients(fis: SugenoFis, data, with_consequents: bool = False):
    """Gradient of 0.5 * SSE w.r.t. the premise vector (and optionally consequents)."""
    x = _check_rows(fis, data.rows)
    lay = _layers(fis, x)
    err = lay.output - np.asarray(data.targets, dtype=float)
    # d out / d w_i; the floor makes the denominator a constant
    d_w = np.where(
        lay.floored[:, None],
        lay.rule_outputs / lay.total[:, None],
        (lay.rule_outputs - lay.output[:, None]) / lay.total[:, None],
    )
    d_w = err[:, None] * d_w

    grad = np.zeros(fis.premise_vector().shape[0])
    slices = fis.premise_slices()
    n = fis.arity
    for j, var in enumerate(fis.inputs):
        others = [k for k in range(n) if k != j]
        loo = lay.gathered[:, :, others].prod(axis=2) if others else np.ones_like(lay.firing)
        onehot = np.zeros((fis.n_rules, len(var.mfs)))
        onehot[np.arange(fis.n_rules), fis.antecedents[:, j]] = 1.0
        d_mu = (d_w * loo) @ onehot  # (S, k_j)
        xj = np.clip(x[:, j], var.lo, var.hi)
        for m, mf in enumerate(var.mfs):
            grad[slices[j][m]] = d_mu[:, m] @ mf.parameter_gradient(xj)
    loss = 0.5 * float(err @ err)
    if not with_consequents:
        return grad, loss
    cons_grad = np.einsum("s,sr,sk->rk", err, lay.normalized, _augment(x))
    return grad, cons_grad, loss


def premise_gradient(fis: SugenoFis, data) -> np.ndarray:
    """Gradient of 0.5 * SSE over ``data`` w.r.t. ``fis.premise_vector()``."""
    return _gradients(fis, data)[0]


def consequent_gradient(fis: SugenoFis, data) -> np.ndarray:
    """Gradient of 0.5 * SSE w.r.t. the consequent matrix."""
    return _gradients(fis, data, with_consequents=True)[1]


def loss(fis: SugenoFis, data) -> float:
    """0.5 * sum of squared errors."""
    r = data.targets - predict(fis, data.rows)
    return 0.5 * float(r @ r)


METHODS = ("hybrid", "backprop")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    method: str = "hybrid"
    error_goal: float = 0.0
    initial_step: float = 0.01
    step_decrease: float = 0.9
    step_increase: float = 1.1

    def __post_init__(self):
        if isinstance(self.epochs, bool) or int(self.epochs) != self.epochs or self.epochs < 1:
            raise ConfigurationError(f"epochs must be a positive integer, got {self.epochs!r}")
        object.__setattr__(self, "epochs", int(self.epochs))
        method = str(self.method).strip().lower()
        if method in ("bp", "backpropagation"):
            method = "backprop"
        if method not in METHODS:
            raise ConfigurationError(f"method must be one of {METHODS}, got {self.method!r}")
        object.__setattr__(self, "method", method)
        if not 0.0 < self.step_decrease < 1.0 < self.step_increase:
            raise ConfigurationError(
                "need 0 < step_decrease < 1 < step_increase, got "
                f"{self.step_decrease} and {self.step_increase}"
            )
        if not self.initial_step >= 0.0 or not math.isfinite(self.initial_step):
            raise ConfigurationError(f"initial_step must be a finite value >= 0, got {self.initial_step}")
        if math.isnan(self.error_goal):
            raise ConfigurationError("error_goal is NaN")


class StepSizeSchedule:
    """Grow the step after four straight error decreases, shrink it after two up-down swings.

    ``baseline`` is the error before the first epoch; the first observation is
    compared against it.
    """

    def __init__(self, initial: float, decrease: float, increase: float, baseline: float = math.inf):
        self.step = float(initial)
        self.decrease = decrease
        self.increase = increase
        self._last = baseline
        self._decreases = 0
        self._moves: list[int] = []

    def observe(self, error: float) -> float:
        move = -1 if error < self._last else (1 if error > self._last else 0)
        self._last = error
        self._moves.append(move)
        self._moves = self._moves[-4:]
        self._decreases = self._decreases + 1 if move < 0 else 0
        if self._decreases == 4:
            self.step *= self.increase
            self._decreases = 0
        elif self._moves == [1, -1, 1, -1]:
            self.step *= self.decrease
            self._moves = []
        return self.step


@dataclass
class TrainHistory:
    rmse: list[float] = field(default_factory=list)
    pre_lse_rmse: list[float] = field(default_factory=list)
    step_sizes: list[float] = field(default_factory=list)
    final_step: float = 0.0
    epochs_run: int = 0
    stop_reason: str = ""
    rank_deficient: bool = False

    @property
    def final_rmse(self) -> float:
        return self.rmse[-1]


def _normalized_step(step: float, grad: np.ndarray) -> np.ndarray | None:
    norm = float(np.linalg.norm(grad))
    if step == 0.0 or not math.isfinite(norm) or norm == 0.0:
        return None
    return step * grad / norm


def train(fis: SugenoFis, data, config: TrainConfig) -> tuple[SugenoFis, TrainHistory]:
    """Train ``fis`` on ``data``; the returned model is the one the last RMSE was measured on."""
    if not isinstance(config, TrainConfig):
        raise ConfigurationError("config must be a TrainConfig")
    n_params = fis.n_rules * (fis.arity + 1)
    if config.method == "hybrid" and len(data.targets) < n_params:
        warnings.warn(
            f"{len(data.targets)} samples for {n_params} consequent parameters; "
            "least squares falls back to a ridge solution",
            RuntimeWarning,
            stacklevel=2,
        )
    history = TrainHistory()
    schedule = StepSizeSchedule(
        config.initial_step,
        config.step_decrease,
        config.step_increase,
        baseline=training_rmse(fis, data),
    )
    history.stop_reason = "epochs-exhausted"
    for epoch in range(1, config.epochs + 1):
        step = schedule.step
        if config.method == "hybrid":
            history.pre_lse_rmse.append(training_rmse(fis, data))
            fitted = lse_consequents(fis, data)
            fis = fitted.fis
            rmse = fitted.rmse
            history.rank_deficient |= fitted.rank_deficient
        else:
            p_grad, c_grad, _ = _gradients(fis, data, with_consequents=True)
            delta = _normalized_step(step, np.concatenate([p_grad, c_grad.ravel()]))
            if delta is not None:
                k = p_grad.shape[0]
                fis = fis.with_premise_vector(fis.premise_vector() - delta[:k])
                fis = fis.with_consequents(fis.consequents - delta[k:].reshape(fis.consequents.shape))
            rmse = training_rmse(fis, data)
        if not math.isfinite(rmse):
            raise NumericalError(f"training RMSE became non-finite at epoch {epoch}")
        history.rmse.append(rmse)
        history.epochs_run = epoch
        history.step_sizes.append(schedule.observe(rmse))
        log.debug("epoch %d rmse %.6g step %.4g", epoch, rmse, step)
        if rmse <= config.error_goal:
            history.stop_reason = "error-goal-met"
            break
        if config.method == "hybrid" and epoch < config.epochs:
            delta = _normalized_step(schedule.step, premise_gradient(fis, data))
            if delta is not None:
                fis = fis.with_premise_vector(fis.premise_vector() - delta)
    history.final_step = schedule.step
    return fis, history
