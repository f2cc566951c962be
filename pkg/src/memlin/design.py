"""Closed-form ridge least-squares design of both linearizers.

The design stacks one regressor matrix per training signal, accumulates the
regularized normal equations, and solves the small symmetric positive
definite system by Cholesky factorization.  For the biased-rectifier
structure the bias span b_max is not part of the least-squares problem, so
a grid of candidate spans is designed and the best candidate kept.  Two
selection rules are available:

* ``"validation"`` (default): highest mean SNDR on held-out signals.
* ``"train_cost"``: lowest training residual E.

Training-cost selection tends to overfit the single training signal's
amplitude distribution (it favors wide grids that chase its rare peak
samples), which costs several dB on fresh signals and makes the two
rectifier kinds diverge; held-out selection is stable.  Ties break toward
the smaller span either way.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DesignError, SingularSystemError, ValidationError
from .linearizer import (
    HammersteinParams,
    NonlinearityKind,
    ProposedParams,
    bias_grid,
    proposed_forward,
)
from .metrics import sndr


@dataclass(frozen=True)
class DesignConfig:
    """Knobs of the least-squares design.

    ``n_branches`` is the branch count N for the proposed structure and the
    highest power K for the Hammerstein one.  ``b_max_range`` and ``q_grid``
    define the candidate span grid; both are ignored by the Hammerstein
    design, which has no biases.
    """

    n_branches: int = 16
    kind: NonlinearityKind = NonlinearityKind.ABS
    lam: float = 0.02
    q_grid: int = 11
    b_max_range: tuple[float, float] = (0.5, 1.0)
    r_train: int = 1
    selection: str = "validation"

    def __post_init__(self):
        if self.n_branches < 1:
            raise ValidationError("n_branches must be >= 1")
        if self.lam < 0:
            raise ValidationError("lambda must be >= 0")
        if self.q_grid < 1:
            raise ValidationError("q_grid must be >= 1")
        lo, hi = self.b_max_range
        if lo <= 0:
            raise ValidationError("b_max_range lower bound must be > 0")
        if hi < lo:
            raise ValidationError("b_max_range must be ordered (lo, hi)")
        if self.r_train < 1:
            raise ValidationError("r_train must be >= 1")
        if self.selection not in ("validation", "train_cost"):
            raise ValidationError(
                f"selection must be 'validation' or 'train_cost', got {self.selection!r}"
            )


@dataclass(frozen=True)
class DesignSolution:
    """A trained parameter set plus design diagnostics."""

    params: ProposedParams | HammersteinParams
    training_cost: float
    gram_condition_estimate: float
    chosen_b_max: float | None = None
    selection_score: float | None = None

    def to_dict(self, lam: float | None = None, seed=None) -> dict:
        from .linearizer import params_to_dict

        doc = params_to_dict(self.params)
        doc["chosen_b_max"] = self.chosen_b_max
        doc["training_cost"] = self.training_cost
        doc["gram_condition_estimate"] = self.gram_condition_estimate
        doc["lambda"] = lam
        doc["seed"] = seed
        return doc


def b_max_candidates(b_max_range: tuple[float, float], q_grid: int) -> np.ndarray:
    """Uniform grid of q_grid span candidates; the range midpoint if q_grid=1."""
    lo, hi = b_max_range
    if q_grid == 1:
        return np.array([0.5 * (lo + hi)])
    q = np.arange(q_grid, dtype=float)
    return lo + (hi - lo) * q / (q_grid - 1)


def build_regressor(v: np.ndarray, biases: np.ndarray, kind: NonlinearityKind) -> np.ndarray:
    """Assemble the L x (N+2) regressor: branch outputs, then v, then ones."""
    v = np.asarray(v, dtype=float)
    biases = np.asarray(biases, dtype=float)
    if biases.size == 0:
        raise ValidationError("biases must be nonempty")
    A = np.empty((v.size, biases.size + 2))
    shifted = v[:, None] + biases[None, :]
    if kind is NonlinearityKind.ABS:
        np.abs(shifted, out=A[:, :-2])
    else:
        np.maximum(shifted, 0.0, out=A[:, :-2])
    A[:, -2] = v
    A[:, -1] = 1.0
    return A


def _hammerstein_regressor(v: np.ndarray, order: int) -> np.ndarray:
    """Columns v^2 .. v^K, then v, then ones."""
    v = np.asarray(v, dtype=float)
    A = np.empty((v.size, order + 1))
    power = v
    for k in range(2, order + 1):
        power = power * v
        A[:, k - 2] = power
    A[:, -2] = v
    A[:, -1] = 1.0
    return A


def accumulate_normal_equations(
    regressors: list[np.ndarray], targets: list[np.ndarray], lam: float
) -> tuple[np.ndarray, np.ndarray]:
    """Form (lam*I + sum_r A_r^T A_r, sum_r A_r^T b_r) over training signals."""
    if len(regressors) != len(targets) or not regressors:
        raise ValidationError("regressors and targets must be aligned and nonempty")
    cols = regressors[0].shape[1]
    gram = lam * np.eye(cols)
    rhs = np.zeros(cols)
    for A, b in zip(regressors, targets):
        b = np.asarray(b, dtype=float)
        if A.shape[0] != b.size or A.shape[1] != cols:
            raise ValidationError(
                f"regressor {A.shape} does not match target length {b.size} / {cols} columns"
            )
        gram += A.T @ A
        rhs += A.T @ b
    return gram, rhs


def spd_solve(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve gram @ w = rhs by Cholesky, falling back to pivoted LU.

    The Gram matrix must be symmetric; with any positive ridge it is also
    positive definite and the Cholesky path is taken.
    """
    gram = np.asarray(gram, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if not (np.isfinite(gram).all() and np.isfinite(rhs).all()):
        raise ValidationError("normal equations contain non-finite entries")
    try:
        c, low = scipy.linalg.cho_factor(gram, check_finite=False)
        return scipy.linalg.cho_solve((c, low), rhs, check_finite=False)
    except scipy.linalg.LinAlgError:
        pass
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(gram, check_finite=False)
            w = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(f"pivoted fallback failed: {exc}") from exc
    if not np.isfinite(w).all():
        raise SingularSystemError("system is singular to working precision")
    return w


def apply_correction(v: np.ndarray, regressor: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Compensated output y = v + A @ w (training-time form of the forward path)."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if regressor.shape != (v.size, w.size):
        raise ValidationError(
            f"regressor shape {regressor.shape} does not match signal ({v.size}) "
            f"and coefficients ({w.size})"
        )
    return v + regressor @ w


def _training_cost(regressors, targets, w) -> float:
    return float(sum(((A @ w - b) ** 2).sum() for A, b in zip(regressors, targets)))


def _as_list(buffers) -> list[np.ndarray]:
    return [np.asarray(b, dtype=float) for b in buffers]


def design_proposed(
    train_refs,
    train_dist,
    cfg: DesignConfig,
    val_refs=None,
    val_dist=None,
) -> DesignSolution:
    """Design the biased-rectifier linearizer over the b_max candidate grid."""
    train_refs = _as_list(train_refs)
    train_dist = _as_list(train_dist)
    if len(train_refs) != len(train_dist) or len(train_refs) != cfg.r_train:
        raise ValidationError(
            f"expected {cfg.r_train} aligned training pairs, "
            f"got {len(train_refs)}/{len(train_dist)}"
        )
    use_validation = cfg.selection == "validation"
    if use_validation:
        if val_refs is None or val_dist is None:
            raise ValidationError("selection='validation' requires held-out signal pairs")
        val_refs = _as_list(val_refs)
        val_dist = _as_list(val_dist)

    targets = [x - v for x, v in zip(train_refs, train_dist)]
    best = None
    failures = []
    for b_max in b_max_candidates(cfg.b_max_range, cfg.q_grid):
        try:
            biases = bias_grid(b_max, cfg.n_branches)
            regressors = [build_regressor(v, biases, cfg.kind) for v in train_dist]
            gram, rhs = accumulate_normal_equations(regressors, targets, cfg.lam)
            w = spd_solve(gram, rhs)
        except (ValidationError, SingularSystemError) as exc:
            failures.append(f"b_max={b_max:g}: {exc}")
            continue
        cost = _training_cost(regressors, targets, w)
        params = ProposedParams(
            c0=float(w[-1]),
            delta_c1=float(w[-2]),
            weights=w[:-2],
            biases=biases,
            kind=cfg.kind,
        )
        if use_validation:
            score = float(
                np.mean(
                    [sndr(x, proposed_forward(params, v)).sndr_db
                     for x, v in zip(val_refs, val_dist)]
                )
            )
        else:
            score = -cost
        if best is None or score > best[0]:
            best = (score, float(b_max), params, cost, gram)
    if best is None:
        raise DesignError("all b_max candidates failed: " + "; ".join(failures))
    score, b_max, params, cost, gram = best
    return DesignSolution(
        params=params,
        training_cost=cost,
        gram_condition_estimate=float(np.linalg.cond(gram)),
        chosen_b_max=b_max,
        selection_score=score,
    )


def design_hammerstein(train_refs, train_dist, cfg: DesignConfig) -> DesignSolution:
    """Design the polynomial linearizer of order K = cfg.n_branches."""
    train_refs = _as_list(train_refs)
    train_dist = _as_list(train_dist)
    if len(train_refs) != len(train_dist) or len(train_refs) != cfg.r_train:
        raise ValidationError(
            f"expected {cfg.r_train} aligned training pairs, "
            f"got {len(train_refs)}/{len(train_dist)}"
        )
    if cfg.n_branches < 2:
        raise ValidationError("Hammerstein design needs order K >= 2")
    targets = [x - v for x, v in zip(train_refs, train_dist)]
    regressors = [_hammerstein_regressor(v, cfg.n_branches) for v in train_dist]
    gram, rhs = accumulate_normal_equations(regressors, targets, cfg.lam)
    w = spd_solve(gram, rhs)
    params = HammersteinParams(c0=float(w[-1]), delta_c1=float(w[-2]), poly_weights=w[:-2])
    return DesignSolution(
        params=params,
        training_cost=_training_cost(regressors, targets, w),
        gram_condition_estimate=float(np.linalg.cond(gram)),
    )
