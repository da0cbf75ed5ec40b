"""Summarizer rate-distortion toolkit.

Discrete sources go through Blahut-Arimoto per length class; Gaussian
embedding sources go through reverse water-filling over per-bin spectra.
"""

from ._core import (
    Curve,
    DiscreteSource,
    DistortionMatrix,
    SrdeError,
    SummarizerKernel,
    approx_rs_curve,
    ba_curve,
    conditional_mutual_information,
    d_max,
    decode_srde,
    default_beta_grid,
    eig_spectrum,
    encode_srde,
    eval_summarizer_embeddings,
    example1,
    expected_distortion,
    gaussian_curve,
    grid_oracle_rd,
    read_embeddings,
    simulate_block_converse,
    solve_for_distortion,
    summarizer_rate,
    write_embeddings,
)

__all__ = [name for name in dir() if not name.startswith("_")]
