"""End-to-end experiment orchestration: training set, evaluation ensemble,
branch/multiplication sweeps, and the before/after spectrum case.

Seeding
-------
Every random draw derives from the master seed through
``numpy.random.SeedSequence(seed, spawn_key=(stream, index, substream))``
with streams 0=training, 1=validation, 2=evaluation and substreams
0=phases, 1=frequency offset.  Signal i of a stream therefore does not
depend on how many signals are drawn, so ensembles are stable under
changes of the ensemble size, and the whole experiment output is a pure
function of the configuration.

Ensemble evaluation and signal synthesis are embarrassingly parallel;
``threads`` only changes wall time, never a single output bit, because
per-signal computations are independent and reductions run in index order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .design import DesignConfig, DesignSolution, design_hammerstein, design_proposed
from .errors import MemlinError, ValidationError
from .linearizer import (
    HammersteinParams,
    NonlinearityKind,
    ProposedParams,
    hammerstein_forward,
    mult_add_count,
    proposed_forward,
)
from .metrics import SpectrumTable, spectrum
from .signals import (
    DistortionModel,
    MultiToneSpec,
    apply_distortion,
    default_distortion_model,
    gen_multitone,
    qpsk_phases,
    quantize,
    sample_freq_offset,
)

SWEEP_CSV_HEADER = "type,branches,mults,adds,mean_sndr_db,std_sndr_db,min_sndr_db"

_STREAM_TRAIN, _STREAM_VALIDATION, _STREAM_EVAL = 0, 1, 2
_SUB_PHASES, _SUB_OFFSET = 0, 1

GENERATOR_NAME = "numpy PCG64 (numpy.random.default_rng)"
SEED_RULE = (
    "SeedSequence(seed, spawn_key=(stream, index, substream)); "
    "streams: train=0, validation=1, eval=2; substreams: phases=0, freq_offset=1"
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything the experiments depend on; serializes 1:1 to the CLI JSON."""

    seed: int = 271828
    ensemble_size: int = 500
    signal_length: int = 2**13
    quant_bits: int | None = 12
    total_carriers: int = 64
    active_carriers: int = 31
    amplitude_scale: float = 0.9 / 31
    design: DesignConfig = field(default_factory=DesignConfig)
    n_validation: int = 4
    distortion: DistortionModel = field(default_factory=default_distortion_model)
    branch_sweep: tuple[int, ...] = tuple(range(1, 25))
    hammerstein_sweep: tuple[int, ...] = tuple(range(2, 14))
    kinds: tuple[NonlinearityKind, ...] = (NonlinearityKind.ABS, NonlinearityKind.RELU)
    spectrum_window: str = "blackmanharris"
    threads: int = 1

    def __post_init__(self):
        if self.ensemble_size < 1:
            raise ValidationError("ensemble_size must be >= 1")
        n = self.signal_length
        if n < 2 or n & (n - 1):
            raise ValidationError(f"signal_length must be a power of two, got {n}")
        if self.quant_bits is not None and not 2 <= self.quant_bits <= 24:
            raise ValidationError(f"quant_bits must be in [2, 24] or null, got {self.quant_bits}")
        if self.n_validation < 1:
            raise ValidationError("n_validation must be >= 1")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")

    # -- JSON mirror -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "ensemble_size": self.ensemble_size,
            "signal_length": self.signal_length,
            "quant_bits": self.quant_bits,
            "total_carriers": self.total_carriers,
            "active_carriers": self.active_carriers,
            "amplitude_scale": self.amplitude_scale,
            "design": {
                "n_branches": self.design.n_branches,
                "kind": self.design.kind.value,
                "lambda": self.design.lam,
                "q_grid": self.design.q_grid,
                "b_max_range": list(self.design.b_max_range),
                "r_train": self.design.r_train,
                "selection": self.design.selection,
            },
            "n_validation": self.n_validation,
            "distortion": [float(a) for a in self.distortion.coefficients],
            "branch_sweep": list(self.branch_sweep),
            "hammerstein_sweep": list(self.hammerstein_sweep),
            "kinds": [k.value for k in self.kinds],
            "spectrum_window": self.spectrum_window,
            "threads": self.threads,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        def bad(key, why):
            return ValidationError(f"config key '{key}': {why}")

        known = {
            "seed", "ensemble_size", "signal_length", "quant_bits",
            "total_carriers", "active_carriers", "amplitude_scale", "design",
            "n_validation", "distortion", "branch_sweep", "hammerstein_sweep",
            "kinds", "spectrum_window", "threads",
        }
        for key in doc:
            if key not in known:
                raise bad(key, "unknown key")
        kwargs = {}
        for key in ("seed", "ensemble_size", "signal_length", "total_carriers",
                    "active_carriers", "n_validation", "threads"):
            if key in doc:
                if not isinstance(doc[key], int) or isinstance(doc[key], bool):
                    raise bad(key, f"expected an integer, got {doc[key]!r}")
                kwargs[key] = doc[key]
        if "quant_bits" in doc:
            qb = doc["quant_bits"]
            if qb is not None and (not isinstance(qb, int) or isinstance(qb, bool)):
                raise bad("quant_bits", f"expected an integer or null, got {qb!r}")
            kwargs["quant_bits"] = qb
        if "amplitude_scale" in doc:
            if not isinstance(doc["amplitude_scale"], (int, float)):
                raise bad("amplitude_scale", "expected a number")
            kwargs["amplitude_scale"] = float(doc["amplitude_scale"])
        if "spectrum_window" in doc:
            kwargs["spectrum_window"] = str(doc["spectrum_window"])
        if "distortion" in doc:
            try:
                kwargs["distortion"] = DistortionModel(np.asarray(doc["distortion"], dtype=float))
            except (TypeError, ValueError, ValidationError) as exc:
                raise bad("distortion", str(exc)) from exc
        for key in ("branch_sweep", "hammerstein_sweep"):
            if key in doc:
                seq = doc[key]
                if (not isinstance(seq, (list, tuple)) or not seq
                        or not all(isinstance(v, int) and not isinstance(v, bool) for v in seq)):
                    raise bad(key, "expected a nonempty list of integers")
                kwargs[key] = tuple(seq)
        if "kinds" in doc:
            try:
                kwargs["kinds"] = tuple(NonlinearityKind(k) for k in doc["kinds"])
            except ValueError as exc:
                raise bad("kinds", str(exc)) from exc
            if not kwargs["kinds"]:
                raise bad("kinds", "must be nonempty")
        if "design" in doc:
            d = doc["design"]
            if not isinstance(d, dict):
                raise bad("design", "expected an object")
            dkw = {}
            try:
                if "n_branches" in d:
                    dkw["n_branches"] = int(d["n_branches"])
                if "kind" in d:
                    dkw["kind"] = NonlinearityKind(d["kind"])
                if "lambda" in d:
                    dkw["lam"] = float(d["lambda"])
                if "q_grid" in d:
                    dkw["q_grid"] = int(d["q_grid"])
                if "b_max_range" in d:
                    lo, hi = d["b_max_range"]
                    dkw["b_max_range"] = (float(lo), float(hi))
                if "r_train" in d:
                    dkw["r_train"] = int(d["r_train"])
                if "selection" in d:
                    dkw["selection"] = str(d["selection"])
                for key in d:
                    if key not in ("n_branches", "kind", "lambda", "q_grid",
                                   "b_max_range", "r_train", "selection"):
                        raise bad(f"design.{key}", "unknown key")
                kwargs["design"] = DesignConfig(**dkw)
            except ValidationError:
                raise
            except (TypeError, ValueError) as exc:
                raise bad("design", str(exc)) from exc
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ValidationError(f"config: {exc}") from exc

    def with_overrides(self, overrides: dict) -> "ExperimentConfig":
        """Apply dotted-path overrides, e.g. {"design.n_branches": 20}."""
        doc = self.to_dict()
        for path, value in overrides.items():
            node = doc
            parts = path.split(".")
            for part in parts[:-1]:
                if not isinstance(node.get(part), dict):
                    raise ValidationError(f"config key '{path}': no such section")
                node = node[part]
            if parts[-1] not in node:
                raise ValidationError(f"config key '{path}': unknown key")
            node[parts[-1]] = value
        return self.from_dict(doc)


# -- signal construction ---------------------------------------------------


def _signal_seed(cfg: ExperimentConfig, stream: int, index: int, substream: int):
    return np.random.SeedSequence(cfg.seed, spawn_key=(stream, index, substream))


def _make_signal(cfg: ExperimentConfig, stream: int, index: int, zero_phase: bool):
    if zero_phase:
        phases = np.zeros(cfg.active_carriers)
    else:
        phases = qpsk_phases(_signal_seed(cfg, stream, index, _SUB_PHASES), cfg.active_carriers)
    offset = sample_freq_offset(
        _signal_seed(cfg, stream, index, _SUB_OFFSET), cfg.total_carriers
    )
    spec = MultiToneSpec(
        total_carriers=cfg.total_carriers,
        active_carriers=cfg.active_carriers,
        amplitudes=np.ones(cfg.active_carriers),
        phases=phases,
        freq_offset=offset,
        scale=cfg.amplitude_scale,
    )
    ref = gen_multitone(spec, cfg.signal_length)
    dist = apply_distortion(cfg.distortion, ref)
    if cfg.quant_bits is not None:
        dist = quantize(dist, cfg.quant_bits)
    return ref, dist


def _parallel_map(fn, items, threads: int):
    """Order-preserving map; results are identical at any thread count."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def make_training_set(cfg: ExperimentConfig):
    """R training pairs; the first signal has all-zero phases and a seeded offset."""
    pairs = _parallel_map(
        lambda r: _make_signal(cfg, _STREAM_TRAIN, r, zero_phase=(r == 0)),
        list(range(cfg.design.r_train)),
        cfg.threads,
    )
    return [p[0] for p in pairs], [p[1] for p in pairs]


def make_validation_set(cfg: ExperimentConfig):
    """Held-out QPSK-phase pairs used for b_max candidate selection."""
    pairs = _parallel_map(
        lambda j: _make_signal(cfg, _STREAM_VALIDATION, j, zero_phase=False),
        list(range(cfg.n_validation)),
        cfg.threads,
    )
    return [p[0] for p in pairs], [p[1] for p in pairs]


def make_eval_ensemble(cfg: ExperimentConfig):
    """M evaluation pairs (reference, distorted) with per-signal seeded draws."""
    return _parallel_map(
        lambda i: _make_signal(cfg, _STREAM_EVAL, i, zero_phase=False),
        list(range(cfg.ensemble_size)),
        cfg.threads,
    )


# -- ensemble evaluation ---------------------------------------------------


@dataclass(frozen=True)
class EnsembleStats:
    """Per-signal SNDRs plus the summary statistics reported in sweep rows.

    ``pooled_db`` rates total error power against total signal power over
    the whole ensemble; ``mean_db`` averages the per-signal dB values.
    """

    per_signal_db: np.ndarray
    mean_db: float
    std_db: float
    min_db: float
    pooled_db: float


def evaluate_ensemble(params, pairs, threads: int = 1) -> EnsembleStats:
    """Run a linearizer over every (reference, distorted) pair and rate it.

    ``params=None`` rates the uncompensated signals.
    """
    if isinstance(params, ProposedParams):
        fwd = lambda v: proposed_forward(params, v)
    elif isinstance(params, HammersteinParams):
        fwd = lambda v: hammerstein_forward(params, v)
    elif params is None:
        fwd = lambda v: v
    else:
        raise ValidationError(f"unsupported parameter type {type(params).__name__}")

    def one(pair):
        ref, dist = pair
        y = fwd(dist)
        p_sig = float(np.sum(ref**2))
        p_err = float(np.sum((y - ref) ** 2))
        db = np.inf if p_err == 0.0 else 10.0 * np.log10(p_sig / p_err)
        return db, p_sig, p_err

    results = _parallel_map(one, list(pairs), threads)
    per_signal = np.array([r[0] for r in results])
    sig_total = sum(r[1] for r in results)
    err_total = sum(r[2] for r in results)
    pooled = np.inf if err_total == 0.0 else 10.0 * np.log10(sig_total / err_total)
    with np.errstate(invalid="ignore"):  # std of an all-inf column is nan
        std_db = float(np.std(per_signal))
    return EnsembleStats(
        per_signal_db=per_signal,
        mean_db=float(np.mean(per_signal)),
        std_db=std_db,
        min_db=float(np.min(per_signal)),
        pooled_db=float(pooled),
    )


# -- sweeps ----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """One sweep point.  ``branches`` counts nonlinear branches: N for the
    proposed structure, K-1 for the Hammerstein one."""

    type: str
    branches: int
    mults: int
    adds: int
    mean_sndr_db: float
    std_sndr_db: float
    min_sndr_db: float
    pooled_sndr_db: float = float("nan")
    chosen_b_max: float | None = None
    training_cost: float | None = None
    valid: bool = True
    error: str | None = None

    def csv_line(self) -> str:
        return (
            f"{self.type},{self.branches},{self.mults},{self.adds},"
            f"{self.mean_sndr_db:.12g},{self.std_sndr_db:.12g},{self.min_sndr_db:.12g}"
        )


def write_sweep_csv(path, rows) -> None:
    with open(path, "w") as fh:
        fh.write(SWEEP_CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.csv_line() + "\n")


def _design_row(cfg, kind, n_branches, train, val, pairs) -> SweepRow:
    train_refs, train_dist = train
    dcfg = replace(cfg.design, n_branches=n_branches, kind=kind)
    name = f"proposed-{kind.value}"
    mults, adds = n_branches + 1, 2 * n_branches + 1
    try:
        sol = design_proposed(train_refs, train_dist, dcfg, val_refs=val[0], val_dist=val[1])
    except MemlinError as exc:
        return SweepRow(
            type=name, branches=n_branches, mults=mults, adds=adds,
            mean_sndr_db=float("nan"), std_sndr_db=float("nan"),
            min_sndr_db=float("nan"), valid=False, error=str(exc),
        )
    stats = evaluate_ensemble(sol.params, pairs, cfg.threads)
    return SweepRow(
        type=name, branches=n_branches, mults=mults, adds=adds,
        mean_sndr_db=stats.mean_db, std_sndr_db=stats.std_db, min_sndr_db=stats.min_db,
        pooled_sndr_db=stats.pooled_db, chosen_b_max=sol.chosen_b_max,
        training_cost=sol.training_cost,
    )


def _hammerstein_row(cfg, order, train, pairs) -> SweepRow:
    train_refs, train_dist = train
    dcfg = replace(cfg.design, n_branches=order)
    mults, adds = 2 * order - 1, order
    try:
        sol = design_hammerstein(train_refs, train_dist, dcfg)
    except MemlinError as exc:
        return SweepRow(
            type="hammerstein", branches=order - 1, mults=mults, adds=adds,
            mean_sndr_db=float("nan"), std_sndr_db=float("nan"),
            min_sndr_db=float("nan"), valid=False, error=str(exc),
        )
    stats = evaluate_ensemble(sol.params, pairs, cfg.threads)
    return SweepRow(
        type="hammerstein", branches=order - 1, mults=mults, adds=adds,
        mean_sndr_db=stats.mean_db, std_sndr_db=stats.std_db, min_sndr_db=stats.min_db,
        pooled_sndr_db=stats.pooled_db, training_cost=sol.training_cost,
    )


def _run_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    if not cfg.branch_sweep:
        raise ValidationError("branch_sweep must be nonempty")
    train = make_training_set(cfg)
    val = make_validation_set(cfg)
    pairs = make_eval_ensemble(cfg)
    rows = []
    for kind in cfg.kinds:
        for n in cfg.branch_sweep:
            rows.append(_design_row(cfg, kind, n, train, val, pairs))
    for order in cfg.hammerstein_sweep:
        rows.append(_hammerstein_row(cfg, order, train, pairs))
    return rows


def run_branch_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    """Rows for SNDR versus branch count, grouped by linearizer type."""
    rows = _run_sweep(cfg)
    return sorted(rows, key=lambda r: (r.type, r.branches))


def run_mult_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    """The same designs keyed by per-sample multiplication count."""
    rows = _run_sweep(cfg)
    return sorted(rows, key=lambda r: (r.mults, r.type, r.branches))


def run_spectrum_case(cfg: ExperimentConfig, n_branches: int) -> tuple[SpectrumTable, SpectrumTable]:
    """Before/after spectra of the first ensemble signal at the given N."""
    train = make_training_set(cfg)
    val = make_validation_set(cfg)
    dcfg = replace(cfg.design, n_branches=n_branches, kind=cfg.kinds[0])
    sol = design_proposed(train[0], train[1], dcfg, val_refs=val[0], val_dist=val[1])
    ref, dist = _make_signal(cfg, _STREAM_EVAL, 0, zero_phase=False)
    y = proposed_forward(sol.params, dist)
    before = spectrum(dist, cfg.spectrum_window)
    after = spectrum(y, cfg.spectrum_window)
    return before, after


def experiment_metadata(cfg: ExperimentConfig, **extra) -> dict:
    """Reproducibility record written next to every CLI output."""
    meta = {
        "artifact": "memlin",
        "version": __version__,
        "generator": GENERATOR_NAME,
        "seed_rule": SEED_RULE,
        "config": cfg.to_dict(),
    }
    meta.update(extra)
    return meta


def save_metadata(path, meta: dict) -> None:
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
