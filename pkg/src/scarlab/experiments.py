"""Disorder-ensemble pipelines and their file outputs.

Every experiment draws realization ``k`` from seed ``seed + k``, so results do
not depend on execution order and serial and parallel runs agree exactly.
"""

from __future__ import annotations

import configparser
import csv
import json
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from functools import lru_cache

import numpy as np
import scipy

from . import __version__
from .cluster import CouplingGraph, load_cluster
from .dynamics import default_times, fidelity_series, make_state, revival_metrics
from .levelstats import (
    average_histograms,
    gap_ratios,
    normalize_spacings,
    reference_pdf,
    spacing_histogram,
)
from .scars import default_window, extract_peaks, scar_fidelity, scar_grid, tower_basis_matrix
from .spectral import (
    SpectralError,
    diagonalize,
    diagonalize_h0,
    first_tower,
    label_towers,
    save_vectors,
    sector_decompose,
    write_spectrum_csv,
)
from .spin import RNG_ALGORITHM, build_h0, build_hamiltonian, build_hran, sample_fields, total_spin_ops

EXPERIMENTS = ("levels", "rstat", "pofs", "rsweep_h", "rgrid_xy", "scar", "ablate", "dynamics")
MODE_ALIASES = {"intra": "intra_l_only", "inter": "inter_l_only"}
DEGENERACY_CUT = 1e-10


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    experiment: str = "rstat"
    cluster: str = "chain:12:periodic"
    h: float = 0.5
    x: float = 0.0
    y: float = 0.0
    seed: int = 0
    realizations: int = 1
    out: str = "out"
    workers: int = 1
    bins: int = 40
    s_max: float = 4.0
    delta: float | None = None
    scope: str = "whole"
    normalize: str = "mean"
    trim: float = 0.0
    min_levels: int = 50
    modes: tuple[str, ...] = ("intra_l_only", "inter_l_only")
    states: tuple[str, ...] = ("W", "GHZ", "Neel")
    tmax: float = 100.0
    tpoints: int = 2000
    h_values: tuple[float, ...] = (0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0)
    x_values: tuple[float, ...] = (0.0, 0.05, 0.1, 0.15, 0.2, 0.3)
    y_values: tuple[float, ...] = (0.0, 0.05, 0.1, 0.15, 0.2, 0.3)
    save_vectors: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.realizations < 1:
            raise ConfigError("realizations must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.scope not in ("whole", "sector"):
            raise ConfigError("scope must be 'whole' or 'sector'")
        numbers = [self.h, self.x, self.y, self.s_max, self.trim, self.tmax]
        numbers += list(self.h_values) + list(self.x_values) + list(self.y_values)
        if self.delta is not None:
            numbers.append(self.delta)
            if self.delta <= 0:
                raise ConfigError("delta must be positive")
        if not all(np.isfinite(numbers)):
            raise ConfigError("numeric options must be finite")
        if self.x < 0 or self.y < 0 or min(self.x_values + self.y_values) < 0:
            raise ConfigError("field half-widths must be non-negative")
        if self.bins < 1 or self.tpoints < 2:
            raise ConfigError("bins and tpoints must be positive")
        for mode in self.modes:
            if mode not in ("none", "full", "intra_l_only", "inter_l_only"):
                raise ConfigError(f"unknown ablation mode {mode!r}")
        self.normalization()
        return self

    def normalization(self) -> tuple[str, int]:
        """``(mode, degree)`` from ``mean`` or ``poly[:degree]``."""
        text = self.normalize
        if text == "mean":
            return "mean_spacing", 0
        if text.startswith("poly"):
            _, _, deg = text.partition(":")
            try:
                return "polynomial", int(deg) if deg else 10
            except ValueError:
                raise ConfigError(f"bad polynomial degree in {text!r}") from None
        raise ConfigError(f"unknown normalization {text!r}")


def _parse_list(value, cast):
    if isinstance(value, (list, tuple)):
        return tuple(cast(v) for v in value)
    return tuple(cast(v) for v in str(value).replace(",", " ").split())


def coerce_options(raw: dict) -> dict:
    """Convert string-valued options (from files or flags) to config field types."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    out = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key not in types:
            raise ConfigError(f"unknown option {key!r}")
        if value is None:
            continue
        t = str(types[key])
        try:
            if key in ("h_values", "x_values", "y_values"):
                out[key] = _parse_list(value, float)
            elif key in ("modes", "states"):
                vals = _parse_list(value, str)
                if key == "modes":
                    vals = tuple(MODE_ALIASES.get(v, v) for v in vals)
                out[key] = vals
            elif key == "save_vectors":
                out[key] = value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
            elif key == "delta":
                out[key] = None if str(value).lower() in ("", "none", "auto") else float(value)
            elif t.startswith("int"):
                out[key] = int(value)
            elif t.startswith("float"):
                out[key] = float(value)
            else:
                out[key] = str(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return out


def read_config_file(path) -> dict:
    """Options from an INI-style file; keys from all sections are merged."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    parser.read_string(text)
    raw = {}
    for section in parser.sections():
        raw.update(parser[section])
    return raw


# --------------------------------------------------------------------------
# per-realization kernels (top-level so they pickle for worker processes)


@lru_cache(maxsize=8)
def sector_levels(graph: CouplingGraph, h: float) -> tuple[np.ndarray, ...]:
    """Eigenvalues of ``H0`` in each magnetization sector."""
    H0 = build_h0(graph, h).real.tocsr()
    out = []
    for idx in sector_decompose(graph.N).values():
        block = H0[idx][:, idx].toarray()
        out.append(diagonalize(block, vectors=False, check=False).energies)
    return tuple(out)


@lru_cache(maxsize=4)
def labeled_h0(graph: CouplingGraph, h: float):
    spec, _ = diagonalize_h0(graph, h)
    return label_towers(spec, total_spin_ops(graph.N)["s2"], h)


def realization_levels(graph, x, y, h, seed, scope="whole", min_levels=50):
    """Level sets for one draw: the whole spectrum, or each large ``m`` sector."""
    if scope == "sector":
        if x != 0 or y != 0:
            raise ConfigError("sector scope needs x = y = 0 (fields mix sectors)")
        return [E for E in sector_levels(graph, h) if E.size >= min_levels]
    if x == 0 and y == 0:
        return [np.sort(np.concatenate(sector_levels(graph, h)))]
    H = build_hamiltonian(graph, sample_fields(graph.N, x, y, h, seed))
    return [diagonalize(H, vectors=False, check=False).energies]


def level_summary(levels, norm_mode="mean_spacing", degree=10, trim=0.0, bins=40, s_max=4.0):
    """Mean gap ratio, dropped count and spacing histogram for one realization.

    With several level sets (sectors) the mean ratio is the average of the
    per-set means and spacings are pooled into one histogram.
    """
    stats = [gap_ratios(E, DEGENERACY_CUT) for E in levels]
    spacings = np.concatenate(
        [
            normalize_spacings(E, norm_mode, degree=degree, trim=trim, degeneracy_cut=DEGENERACY_CUT)
            for E in levels
        ]
    )
    means = [st.mean_r for st in stats if np.isfinite(st.mean_r)]
    return {
        "mean_r": float(np.mean(means)) if means else float("nan"),
        "dropped": int(sum(st.dropped_degenerate for st in stats)),
        "hist": spacing_histogram(spacings, bins, s_max),
    }


@contextmanager
def realization_context(index, seed):
    """Re-raise solver failures tagged with the realization that caused them."""
    try:
        yield
    except (SpectralError, np.linalg.LinAlgError) as exc:
        raise SpectralError(f"realization {index} (seed {seed}): {exc}") from exc


def _levels_job(args):
    k, graph, x, y, h, seed, scope, min_levels, norm, trim, bins, s_max = args
    with realization_context(k, seed):
        levels = realization_levels(graph, x, y, h, seed, scope, min_levels)
    return level_summary(levels, norm[0], norm[1], trim, bins, s_max)


def run_level_ensemble(graph, x, y, h, seed, realizations, scope="whole", min_levels=50,
                       normalize=("mean_spacing", 10), trim=0.0, bins=40, s_max=4.0, workers=1):
    """Per-realization level summaries for seeds ``seed .. seed + realizations - 1``."""
    jobs = [
        (k, graph, x, y, h, seed + k, scope, min_levels, normalize, trim, bins, s_max)
        for k in range(realizations)
    ]
    return _map(_levels_job, jobs, workers)


def _map(fn, jobs, workers):
    if workers == 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def scar_analysis(graph, realization, window=None):
    """Perturbed spectrum, first-tower profile and its peaks for one draw."""
    H = build_hamiltonian(graph, realization)
    spec = diagonalize(H)
    ft = first_tower(graph, realization.h)
    if window is None:
        window = default_window(spec.energies)
    grid = scar_grid(spec.energies, window, ft.energies)
    profile = scar_fidelity(spec, ft.states, grid, window, tower_ref=(1, graph.N / 2))
    return spec, ft, profile, extract_peaks(profile)


def ablation_r(graph, realization, modes):
    table = labeled_h0(graph, realization.h)
    h_ran = build_hran(realization, graph.N)
    out = {}
    for mode in modes:
        M = tower_basis_matrix(table, h_ran, mode)
        out[mode] = gap_ratios(diagonalize(M, vectors=False, check=False).energies, DEGENERACY_CUT)
    return out


# --------------------------------------------------------------------------
# experiment drivers


@dataclass
class RunManifest:
    config: dict
    generator: str
    seeds: list
    software: dict
    started: str
    wall_clock_s: float = 0.0
    outputs: list = field(default_factory=list)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _realizations(cfg, graph, x=None, y=None, h=None):
    x = cfg.x if x is None else x
    y = cfg.y if y is None else y
    h = cfg.h if h is None else h
    return [sample_fields(graph.N, x, y, h, cfg.seed + k) for k in range(cfg.realizations)]


def _write_fields(path, reals):
    with open(path, "w") as fh:
        for r in reals:
            fh.write(r.to_record() + "\n")


def _exp_levels(cfg, graph, out):
    files = []
    reals = _realizations(cfg, graph)
    for k, real in enumerate(reals):
        name = "spectrum.csv" if cfg.realizations == 1 else f"spectrum_r{k:03d}.csv"
        if cfg.x == 0 and cfg.y == 0:
            table = labeled_h0(graph, cfg.h)
            order = np.argsort(table.energies, kind="stable")
            write_spectrum_csv(
                os.path.join(out, name), table.energies[order], table.m[order],
                table.l[order], table.n[order],
            )
            vecs = table.vectors[:, order]
        else:
            with realization_context(k, real.seed):
                spec = diagonalize(build_hamiltonian(graph, real), vectors=cfg.save_vectors)
            write_spectrum_csv(os.path.join(out, name), spec.energies)
            vecs = spec.vectors
        files.append(name)
        if cfg.save_vectors:
            vname = name.replace(".csv", ".bin")
            save_vectors(os.path.join(out, vname), vecs)
            files.append(vname)
    return files


def _exp_rstat(cfg, graph, out):
    res = run_level_ensemble(graph, cfg.x, cfg.y, cfg.h, cfg.seed, cfg.realizations,
                             cfg.scope, cfg.min_levels, cfg.normalization(), cfg.trim,
                             cfg.bins, cfg.s_max, cfg.workers)
    scope = "m_sector" if cfg.scope == "sector" else "whole_spectrum"
    _write_csv(os.path.join(out, "rstat.csv"),
               ["realization", "scope", "mean_r", "dropped_degenerate"],
               [(k, scope, r["mean_r"], r["dropped"]) for k, r in enumerate(res)])
    return ["rstat.csv"]


def write_pofs(path, hist):
    rows = []
    for a, b, d, c in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.densities, hist.centers):
        rows.append((a, b, d, reference_pdf("poisson", c), reference_pdf("goe", c), reference_pdf("gue", c)))
    _write_csv(path, ["bin_left", "bin_right", "density", "reference_poisson",
                      "reference_goe", "reference_gue"], rows)


def _exp_pofs(cfg, graph, out):
    res = run_level_ensemble(graph, cfg.x, cfg.y, cfg.h, cfg.seed, cfg.realizations,
                             cfg.scope, cfg.min_levels, cfg.normalization(), cfg.trim,
                             cfg.bins, cfg.s_max, cfg.workers)
    write_pofs(os.path.join(out, "pofs.csv"), average_histograms(r["hist"] for r in res))
    return ["pofs.csv"]


def _exp_rsweep_h(cfg, graph, out):
    rows = []
    for h in cfg.h_values:
        res = run_level_ensemble(graph, cfg.x, cfg.y, h, cfg.seed, cfg.realizations,
                                 workers=cfg.workers)
        r = np.array([v["mean_r"] for v in res])
        rows.append((h, r.mean(), r.std(), cfg.realizations))
    _write_csv(os.path.join(out, "rsweep.csv"), ["h", "mean_r", "std_r", "realizations"], rows)
    return ["rsweep.csv"]


def _exp_rgrid_xy(cfg, graph, out):
    rows = []
    for x in cfg.x_values:
        for y in cfg.y_values:
            res = run_level_ensemble(graph, x, y, cfg.h, cfg.seed, cfg.realizations,
                                     workers=cfg.workers)
            r = np.array([v["mean_r"] for v in res])
            rows.append((x, y, r.mean(), cfg.realizations))
    _write_csv(os.path.join(out, "rgrid.csv"), ["x", "y", "mean_r", "realizations"], rows)
    return ["rgrid.csv"]


def _exp_scar(cfg, graph, out):
    rows = []
    for k, real in enumerate(_realizations(cfg, graph)):
        with realization_context(k, real.seed):
            _, ft, profile, peaks = scar_analysis(graph, real, cfg.delta)
        peak_at = {e for e, _ in peaks}
        for E, f in zip(profile.energy_grid, profile.f_values):
            j = int(np.argmin(np.abs(ft.energies - E)))
            rows.append((k, E, f, int(E in peak_at), ft.energies[j], E - ft.energies[j]))
    _write_csv(os.path.join(out, "scar_f.csv"),
               ["realization", "E", "f", "is_peak", "nearest_ladder_E", "ladder_deviation"], rows)
    return ["scar_f.csv"]


def _exp_ablate(cfg, graph, out):
    rows = []
    for k, real in enumerate(_realizations(cfg, graph)):
        with realization_context(k, real.seed):
            res = ablation_r(graph, real, cfg.modes)
        rows.extend((k, mode, res[mode].mean_r) for mode in cfg.modes)
    _write_csv(os.path.join(out, "ablation.csv"), ["realization", "mode", "mean_r"], rows)
    return ["ablation.csv"]


def _exp_dynamics(cfg, graph, out):
    times = default_times(cfg.tmax, cfg.tpoints)
    rows, summary = [], []
    for k, real in enumerate(_realizations(cfg, graph)):
        with realization_context(k, real.seed):
            spec = diagonalize(build_hamiltonian(graph, real))
        for kind in cfg.states:
            if kind.startswith("custom:"):
                psi = make_state("custom", graph.N, kind.split(":", 1)[1])
            else:
                psi = make_state(kind, graph.N)
            series = fidelity_series(spec, psi, times)
            rows.extend((t, F, kind, k) for t, F in zip(series.times, series.values))
            met = revival_metrics(series)
            summary.append((k, kind, met["min_F"], len(met["revival_peaks"]),
                            "" if met["decay_time"] is None else met["decay_time"]))
    _write_csv(os.path.join(out, "fidelity.csv"), ["t", "F", "state_kind", "realization"], rows)
    _write_csv(os.path.join(out, "revivals.csv"),
               ["realization", "state_kind", "min_F", "revival_peaks", "decay_time"], summary)
    with open(os.path.join(out, "plot_fidelity.py"), "w") as fh:
        fh.write(PLOT_SCRIPT)
    return ["fidelity.csv", "revivals.csv", "plot_fidelity.py"]


PLOT_SCRIPT = '''"""Plot return fidelities written by the dynamics experiment."""
import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = defaultdict(lambda: ([], []))
with open(os.path.join(here, "fidelity.csv")) as fh:
    for row in csv.DictReader(fh):
        key = (row["state_kind"], row["realization"])
        curves[key][0].append(float(row["t"]))
        curves[key][1].append(float(row["F"]))
for (kind, k), (t, F) in sorted(curves.items()):
    plt.plot(t, F, label=f"{kind} (realization {k})")
plt.xlabel("t")
plt.ylabel("F(t)")
plt.legend()
plt.savefig(os.path.join(here, "fidelity.png"), dpi=150)
'''

_DRIVERS = {
    "levels": _exp_levels,
    "rstat": _exp_rstat,
    "pofs": _exp_pofs,
    "rsweep_h": _exp_rsweep_h,
    "rgrid_xy": _exp_rgrid_xy,
    "scar": _exp_scar,
    "ablate": _exp_ablate,
    "dynamics": _exp_dynamics,
}


def run_experiment(cfg: ExperimentConfig) -> RunManifest:
    """Run one configured experiment, writing its CSVs and ``manifest.json``."""
    cfg.validate()
    graph = load_cluster(cfg.cluster)
    try:
        os.makedirs(cfg.out, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {cfg.out}: {exc}") from exc
    if not os.access(cfg.out, os.W_OK):
        raise ConfigError(f"output directory {cfg.out} is not writable")
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    outputs = _DRIVERS[cfg.experiment](cfg, graph, cfg.out)
    if cfg.experiment not in ("rsweep_h", "rgrid_xy"):
        _write_fields(os.path.join(cfg.out, "fields.jsonl"), _realizations(cfg, graph))
        outputs.append("fields.jsonl")
    manifest = RunManifest(
        config=asdict(cfg),
        generator=RNG_ALGORITHM,
        seeds=[cfg.seed + k for k in range(cfg.realizations)],
        software={
            "scarlab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        started=started,
        wall_clock_s=time.perf_counter() - t0,
        outputs=outputs,
    )
    with open(os.path.join(cfg.out, "manifest.json"), "w") as fh:
        json.dump(asdict(manifest), fh, indent=2)
    return manifest
