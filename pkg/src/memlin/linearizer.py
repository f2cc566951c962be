"""Forward paths of both linearizers and their arithmetic cost model.

Both correctors act sample by sample on the distorted signal v:

* proposed:     y = c0 + v + dc1*v + sum_m w_m * f(v + b_m)
* Hammerstein:  y = c0 + v + dc1*v + sum_k c_k * v^k   (k = 2..K)

The linear coefficient is stored as the deviation dc1 from unity, which is
what the least-squares design produces directly; the effective gain is
1 + dc1.  Branch accumulation runs in ascending m (or k) so repeated runs
produce bit-identical outputs.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


class NonlinearityKind(enum.Enum):
    """Branch nonlinearity: full-wave rectifier or half-wave rectifier."""

    ABS = "abs"
    RELU = "relu"


def nonlinearity(kind: NonlinearityKind, v):
    """Apply the branch nonlinearity: ABS -> |v|, RELU -> max(0, v)."""
    if kind is NonlinearityKind.ABS:
        return np.abs(v)
    return np.maximum(0.0, v)


def bias_grid(b_max: float, n_branches: int) -> np.ndarray:
    """Uniform bias grid b_m = -b_max + 2*(m-1)*b_max/(N-1), m = 1..N."""
    if b_max <= 0:
        raise ValidationError(f"b_max must be positive, got {b_max}")
    if n_branches < 2:
        raise ValidationError(
            f"bias grid needs at least 2 branches (grid step divides by N-1), got {n_branches}"
        )
    m = np.arange(1, n_branches + 1, dtype=float)
    return -b_max + 2.0 * (m - 1.0) * b_max / (n_branches - 1.0)


@dataclass(frozen=True, eq=False)
class ProposedParams:
    """Coefficients of the biased-rectifier linearizer."""

    c0: float
    delta_c1: float
    weights: np.ndarray
    biases: np.ndarray
    kind: NonlinearityKind

    def __eq__(self, other):
        if not isinstance(other, ProposedParams):
            return NotImplemented
        return (
            self.c0 == other.c0
            and self.delta_c1 == other.delta_c1
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.biases, other.biases)
            and self.kind is other.kind
        )

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "biases", np.asarray(self.biases, dtype=float))
        if self.weights.ndim != 1 or self.weights.size < 1:
            raise ValidationError("weights must be a nonempty 1-D array")
        if self.weights.shape != self.biases.shape:
            raise ValidationError(
                f"weights ({self.weights.size}) and biases ({self.biases.size}) "
                "must have equal length"
            )
        if self.biases.size > 1 and not np.all(np.diff(self.biases) > 0):
            raise ValidationError("biases must be strictly increasing")
        self.weights.setflags(write=False)
        self.biases.setflags(write=False)

    @property
    def n_branches(self) -> int:
        return self.weights.size


@dataclass(frozen=True, eq=False)
class HammersteinParams:
    """Coefficients of the parallel polynomial linearizer (c_2..c_K)."""

    c0: float
    delta_c1: float
    poly_weights: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, HammersteinParams):
            return NotImplemented
        return (
            self.c0 == other.c0
            and self.delta_c1 == other.delta_c1
            and np.array_equal(self.poly_weights, other.poly_weights)
        )

    def __post_init__(self):
        object.__setattr__(self, "poly_weights", np.asarray(self.poly_weights, dtype=float))
        if self.poly_weights.ndim != 1:
            raise ValidationError("poly_weights must be 1-D")
        self.poly_weights.setflags(write=False)

    @property
    def order(self) -> int:
        """Highest power K; 1 when there are no nonlinear terms."""
        return self.poly_weights.size + 1


def proposed_forward(params: ProposedParams, v: np.ndarray) -> np.ndarray:
    """Run the biased-rectifier corrector over a buffer of distorted samples."""
    v = np.asarray(v, dtype=float)
    acc = np.zeros_like(v)
    tmp = np.empty_like(v)
    rectify = np.abs if params.kind is NonlinearityKind.ABS else _relu
    for wm, bm in zip(params.weights, params.biases):
        np.add(v, bm, out=tmp)
        rectify(tmp, out=tmp)
        tmp *= wm
        acc += tmp
    np.multiply(v, params.delta_c1, out=tmp)
    acc += tmp
    acc += v
    acc += params.c0
    return acc


def _relu(x, out):
    return np.maximum(x, 0.0, out=out)


def hammerstein_forward(params: HammersteinParams, v: np.ndarray) -> np.ndarray:
    """Run the polynomial corrector; powers built by successive multiplication."""
    v = np.asarray(v, dtype=float)
    acc = np.zeros_like(v)
    tmp = np.empty_like(v)
    power = v.copy()
    for ck in params.poly_weights:
        power *= v
        np.multiply(power, ck, out=tmp)
        acc += tmp
    np.multiply(v, params.delta_c1, out=tmp)
    acc += tmp
    acc += v
    acc += params.c0
    return acc


def mult_add_count(params) -> tuple[int, int]:
    """Per-sample (multiplications, two-input additions) of a forward pass.

    Hammerstein with K branches costs (2K-1, K): K coefficient multiplies
    plus K-1 multiplies to build the powers.  The proposed structure with
    N branches costs (N+1, 2N+1): one multiply per branch plus the linear
    one, and N extra additions for the biases.
    """
    if isinstance(params, ProposedParams):
        n = params.n_branches
        return n + 1, 2 * n + 1
    if isinstance(params, HammersteinParams):
        k = params.order
        return 2 * k - 1, k
    raise ValidationError(f"unsupported parameter type {type(params).__name__}")


def params_to_dict(params) -> dict:
    """JSON-ready dict; float values survive a round trip bit-exactly."""
    if isinstance(params, ProposedParams):
        return {
            "type": "proposed",
            "kind": params.kind.value,
            "c0": params.c0,
            "delta_c1": params.delta_c1,
            "weights": [float(w) for w in params.weights],
            "biases": [float(b) for b in params.biases],
        }
    if isinstance(params, HammersteinParams):
        return {
            "type": "hammerstein",
            "c0": params.c0,
            "delta_c1": params.delta_c1,
            "weights": [float(c) for c in params.poly_weights],
        }
    raise ValidationError(f"unsupported parameter type {type(params).__name__}")


def params_from_dict(doc: dict):
    """Inverse of :func:`params_to_dict`."""
    try:
        kind = doc["type"]
        if kind == "proposed":
            return ProposedParams(
                c0=float(doc["c0"]),
                delta_c1=float(doc["delta_c1"]),
                weights=doc["weights"],
                biases=doc["biases"],
                kind=NonlinearityKind(doc["kind"]),
            )
        if kind == "hammerstein":
            return HammersteinParams(
                c0=float(doc["c0"]),
                delta_c1=float(doc["delta_c1"]),
                poly_weights=doc["weights"],
            )
    except KeyError as exc:
        raise ValidationError(f"parameter document missing key {exc}") from exc
    raise ValidationError(f"unknown linearizer type {doc.get('type')!r}")


def save_params(path, params) -> None:
    with open(path, "w") as fh:
        json.dump(params_to_dict(params), fh, indent=2)
        fh.write("\n")


def load_params(path):
    with open(path) as fh:
        return params_from_dict(json.load(fh))
