#!/usr/bin/env python3
"""Walk through the signal chain: multi-tone reference -> polynomial
distortion -> 12-bit quantization, with the SNDR/ENOB numbers at each stage.
"""

import numpy as np

from memlin import (
    MultiToneSpec,
    apply_distortion,
    default_distortion_model,
    enob,
    gen_multitone,
    qpsk_phases,
    quantize,
    sample_freq_offset,
    sndr,
)

L = 2**13

# 31 active carriers of 64, QPSK phases, random frequency offset, 0.9 headroom
spec = MultiToneSpec(
    total_carriers=64,
    active_carriers=31,
    amplitudes=np.ones(31),
    phases=qpsk_phases(seed=7, count=31),
    freq_offset=sample_freq_offset(seed=8),
    scale=0.9 / 31,
)
x = gen_multitone(spec, L)
print(f"reference: L={L}, rms={np.sqrt(np.mean(x**2)):.4f}, peak={np.abs(x).max():.4f}")

model = default_distortion_model()
print(f"distortion: a2={model.coefficients[2]:+.4f}, a3={model.coefficients[3]:+.4f}, "
      f"..., a10={model.coefficients[10]:+.4f}")

v = apply_distortion(model, x)
report = sndr(x, v)
print(f"after distortion : SNDR {report.sndr_db:6.2f} dB   "
      f"ENOB {enob(report.sndr_db, report.signal_power_db):.2f} bits")

vq = quantize(v, bits=12)
report = sndr(x, vq)
print(f"after 12-bit ADC : SNDR {report.sndr_db:6.2f} dB   "
      f"ENOB {enob(report.sndr_db, report.signal_power_db):.2f} bits")

xq = quantize(x, bits=12)
report = sndr(x, xq)
print(f"quantization only: SNDR {report.sndr_db:6.2f} dB   <- the 58 dB ceiling "
      "any linearizer is chasing")
