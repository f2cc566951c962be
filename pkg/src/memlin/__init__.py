"""Low-complexity memoryless linearization of analog-to-digital interfaces.

The package reproduces, at desk scale, a biased-rectifier post-corrector for
polynomially distorted ADC outputs: multi-tone OFDM-style test signals,
closed-form ridge least-squares design, and SNDR/complexity evaluation
against the parallel Hammerstein baseline.
"""

__version__ = "0.1.0"

from .errors import (
    DesignError,
    MemlinError,
    RangeError,
    SingularSystemError,
    UndefinedMetricError,
    ValidationError,
)
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
from .linearizer import (
    HammersteinParams,
    NonlinearityKind,
    ProposedParams,
    bias_grid,
    hammerstein_forward,
    load_params,
    mult_add_count,
    nonlinearity,
    params_from_dict,
    params_to_dict,
    proposed_forward,
    save_params,
)
from .design import (
    DesignConfig,
    DesignSolution,
    accumulate_normal_equations,
    apply_correction,
    b_max_candidates,
    build_regressor,
    design_hammerstein,
    design_proposed,
    spd_solve,
)
from .metrics import SndrReport, SpectrumTable, enob, sndr, spectrum
from .harness import (
    EnsembleStats,
    ExperimentConfig,
    SweepRow,
    evaluate_ensemble,
    make_eval_ensemble,
    make_training_set,
    make_validation_set,
    run_branch_sweep,
    run_mult_sweep,
    run_spectrum_case,
)
