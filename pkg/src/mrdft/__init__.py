"""Fast multiresolution discrete Fourier transform."""

from .core import (
    ContractViolation,
    Layout,
    MrPlan,
    MrSpectrum,
    OpCounter,
    apply_gamma,
    bit_reverse_index,
    gamma_permute,
    make_plan,
    mrdft_fast,
    stage_combine,
    stage_one,
    sub_fft_dif,
)
from .oracle import mrdft_dense_pipeline, mrdft_direct, mrdft_per_level_fft

__version__ = "0.1.0"
