"""Exact diagonalization of spin-1/2 Heisenberg clusters in random transverse
fields: tower structure, level statistics, scar profiles and revival dynamics.
"""

__version__ = "0.1.0"

from .cluster import ClusterSpec, CouplingGraph, build_cluster, coupling_sum, load_cluster
from .dynamics import FidelitySeries, fidelity_series, make_state, revival_metrics
from .levelstats import (
    GapRatioStat,
    LevelSet,
    SpacingHistogram,
    average_histograms,
    gap_ratios,
    normalize_spacings,
    reference_pdf,
    reference_r,
    spacing_histogram,
)
from .scars import ScarProfile, extract_peaks, scar_fidelity, tower_basis_matrix
from .spectral import (
    FirstTower,
    Spectrum,
    TowerTable,
    diagonalize,
    diagonalize_h0,
    first_tower,
    label_towers,
    sector_decompose,
    tower_count,
)
from .spin import (
    FieldRealization,
    build_h0,
    build_hamiltonian,
    build_hran,
    sample_fields,
    spin_operator,
    total_spin_ops,
    tower_op,
)
