"""Run-wide tolerances and sampling knobs.

A single frozen dataclass carries every tunable used by the factorizer,
the spectrum samplers, and the perturbation probes, so a run is fully
reproducible from (input, Config).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Config:
    # verdict tolerance: factor residuals, membership witnesses, commutators
    tol: float = 1e-7
    seed: int = 42

    # characteristic-polynomial interpolation
    grid_cap: int = 10**6
    prune_rel: float = 1e-10
    interpolation_radius: float = 1.0

    # linear-factor extraction
    direction_redraws: int = 8
    continuation_steps: int = 16
    max_continuation_steps: int = 1024
    path_merge_tol: float = 5e-5
    degeneracy_rel: float = 1e-10
    verify_points: int = 100
    root_cluster_tol: float = 1e-6

    # spectra sampling
    hyperplane_samples: int = 20

    # perturbation probes
    contour_nodes: int = 64
    contour_margin: float = 0.2
    fd_epsilons: tuple[float, ...] = (1e-3, 1e-4, 1e-5)
    tangent_steps: tuple[float, ...] = (1e-4, 1e-5)
    derivative_tol: float = 1e-6

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.continuation_steps < 1 or self.max_continuation_steps < self.continuation_steps:
            raise ValueError("inconsistent continuation step limits")
