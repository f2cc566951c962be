"""Multi-tone test signals, polynomial distortion, and uniform quantization.

Signals are plain 1-D float64 numpy arrays in the full-scale range [-1, 1).
All random draws go through seeded ``numpy.random.default_rng`` generators
(PCG64), so identical seeds reproduce identical buffers on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError, ValidationError

#: The four QPSK constellation angles (radians).
QPSK_ANGLES = (np.pi / 4, -np.pi / 4, 3 * np.pi / 4, -3 * np.pi / 4)


@dataclass(frozen=True, eq=False)
class MultiToneSpec:
    """Carrier layout of a multi-tone reference signal.

    The signal emulates the quadrature component of an OFDM symbol:
    ``active_carriers`` sinusoids on a uniform frequency grid of
    ``total_carriers`` slots, with a common frequency offset and a global
    amplitude scale.
    """

    total_carriers: int
    active_carriers: int
    amplitudes: np.ndarray
    phases: np.ndarray
    freq_offset: float = 0.0
    scale: float = 1.0

    def __eq__(self, other):
        if not isinstance(other, MultiToneSpec):
            return NotImplemented
        return (
            self.total_carriers == other.total_carriers
            and self.active_carriers == other.active_carriers
            and np.array_equal(self.amplitudes, other.amplitudes)
            and np.array_equal(self.phases, other.phases)
            and self.freq_offset == other.freq_offset
            and self.scale == other.scale
        )

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=float))
        object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))
        if self.total_carriers < 1 or self.active_carriers < 1:
            raise ValidationError("total_carriers and active_carriers must be positive")
        if self.active_carriers > self.total_carriers / 2 - 1:
            raise ValidationError(
                f"active_carriers={self.active_carriers} exceeds "
                f"total_carriers/2 - 1 = {self.total_carriers / 2 - 1:g}"
            )
        if self.amplitudes.shape != (self.active_carriers,):
            raise ValidationError(
                f"amplitudes must have exactly {self.active_carriers} entries, "
                f"got {self.amplitudes.size}"
            )
        if self.phases.shape != (self.active_carriers,):
            raise ValidationError(
                f"phases must have exactly {self.active_carriers} entries, "
                f"got {self.phases.size}"
            )
        if abs(self.freq_offset) > np.pi / self.total_carriers:
            raise ValidationError(
                f"|freq_offset|={abs(self.freq_offset):g} exceeds "
                f"pi/total_carriers={np.pi / self.total_carriers:g}"
            )
        self.amplitudes.setflags(write=False)
        self.phases.setflags(write=False)

    @property
    def carrier_freqs(self) -> np.ndarray:
        """Angular frequencies 2*pi*k/total + offset for k = 1..active."""
        k = np.arange(1, self.active_carriers + 1)
        return 2.0 * np.pi * k / self.total_carriers + self.freq_offset


@dataclass(frozen=True, eq=False)
class DistortionModel:
    """Memoryless polynomial channel: v = a0 + a1*x + sum_p a_p*x^p."""

    coefficients: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0]))

    def __eq__(self, other):
        if not isinstance(other, DistortionModel):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=float))
        if self.coefficients.ndim != 1 or self.coefficients.size < 2:
            raise ValidationError("coefficients must be a 1-D array of length >= 2")
        if self.coefficients[1] == 0.0:
            raise ValidationError("linear coefficient a_1 must be nonzero")
        self.coefficients.setflags(write=False)

    @property
    def order(self) -> int:
        return self.coefficients.size - 1


def default_distortion_model() -> DistortionModel:
    """Tenth-order alternating-sign model: a0=0, a1=1, a_p = (-1)^p * 0.15 / p."""
    coeffs = np.zeros(11)
    coeffs[1] = 1.0
    p = np.arange(2, 11)
    coeffs[2:] = (-1.0) ** p * 0.15 / p
    return DistortionModel(coeffs)


def gen_multitone(spec: MultiToneSpec, length: int) -> np.ndarray:
    """Synthesize the multi-tone signal for sample indices n = 0..length-1.

    x[n] = scale * sum_k A_k * sin(w_k * n + alpha_k), with the carrier
    frequencies taken from ``spec.carrier_freqs``.
    """
    if length < 1:
        raise ValidationError("length must be >= 1")
    n = np.arange(length, dtype=float)
    args = np.outer(n, spec.carrier_freqs) + spec.phases
    return spec.scale * (np.sin(args) @ spec.amplitudes)


def qpsk_phases(seed, count: int) -> np.ndarray:
    """Draw ``count`` phases uniformly from the four QPSK angles, seeded."""
    if count < 1:
        raise ValidationError("count must be >= 1")
    rng = np.random.default_rng(seed)
    return np.asarray(QPSK_ANGLES)[rng.integers(0, 4, size=count)]


def sample_freq_offset(seed, total_carriers: int = 64) -> float:
    """Draw one frequency offset, uniform on [-pi/total, pi/total], seeded."""
    rng = np.random.default_rng(seed)
    bound = np.pi / total_carriers
    return float(rng.uniform(-bound, bound))


def apply_distortion(model: DistortionModel, x: np.ndarray) -> np.ndarray:
    """Evaluate the polynomial channel per sample (Horner form)."""
    x = np.asarray(x, dtype=float)
    coeffs = model.coefficients
    v = np.full_like(x, coeffs[-1])
    for c in coeffs[-2::-1]:
        v = v * x + c
    return v


def quantize(x: np.ndarray, bits: int) -> np.ndarray:
    """Mid-tread uniform quantizer over the full-scale range [-1, 1).

    Step is 2^(1-bits); codes round half away from zero and clamp to
    [-2^(bits-1), 2^(bits-1) - 1].  Requires |x| <= 1 everywhere.
    """
    if not 2 <= bits <= 24:
        raise ValidationError(f"bits must be in [2, 24], got {bits}")
    x = np.asarray(x, dtype=float)
    if np.abs(x).max(initial=0.0) > 1.0:
        raise RangeError("samples exceed full scale: |x| > 1")
    step = 2.0 ** (1 - bits)
    codes = np.copysign(np.floor(np.abs(x) / step + 0.5), x)
    np.clip(codes, -(2.0 ** (bits - 1)), 2.0 ** (bits - 1) - 1, out=codes)
    return codes * step


def save_csv(path, x: np.ndarray) -> None:
    """Write a signal as decimal text, one sample per line, header ``sample``."""
    x = np.asarray(x, dtype=float)
    with open(path, "w") as fh:
        fh.write("sample\n")
        for value in x:
            fh.write(f"{float(value)!r}\n")


def load_csv(path) -> np.ndarray:
    """Read a signal written by :func:`save_csv`."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "sample":
            raise ValidationError(f"expected header 'sample', got {header!r}")
        return np.array([float(line) for line in fh if line.strip()])
