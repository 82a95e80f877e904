"""Command-line entry point: ``scarlab <experiment> [options]``."""

from __future__ import annotations

import argparse
import sys

from numpy.linalg import LinAlgError

from .cluster import ClusterError
from .experiments import EXPERIMENTS, ConfigError, ExperimentConfig, coerce_options, read_config_file, run_experiment
from .spectral import SpectralError

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scarlab", description=__doc__)
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="INI-style file of options; flags override it")
    p.add_argument("--cluster", help="preset such as chain:12:periodic, or a cluster file")
    p.add_argument("--h", type=float, help="uniform z-field")
    p.add_argument("--x", type=float, help="half-width of the random x-fields")
    p.add_argument("--y", type=float, help="half-width of the random y-fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--realizations", type=int)
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--s-max", type=float)
    p.add_argument("--delta", help="scar window (energy units) or 'auto'")
    p.add_argument("--scope", choices=("whole", "sector"))
    p.add_argument("--normalize", help="mean or poly:<degree>")
    p.add_argument("--trim", type=float, help="fraction of spacings dropped at each edge")
    p.add_argument("--min-levels", type=int)
    p.add_argument("--mode", dest="modes", help="comma list of none,full,intra,inter")
    p.add_argument("--state", dest="states", help="comma list of W,GHZ,Neel,custom:<bits>")
    p.add_argument("--tmax", type=float)
    p.add_argument("--tpoints", type=int)
    p.add_argument("--h-values", help="comma list of h for rsweep_h")
    p.add_argument("--x-values", help="comma list of x for rgrid_xy")
    p.add_argument("--y-values", help="comma list of y for rgrid_xy")
    p.add_argument("--save-vectors", action="store_const", const=True)
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    raw = read_config_file(args.config) if args.config else {}
    raw.pop("experiment", None)
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "experiment") and v is not None}
    opts = coerce_options(raw)
    opts.update(coerce_options(flags))
    return ExperimentConfig(experiment=args.experiment, **opts).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        manifest = run_experiment(cfg)
    except (ConfigError, ClusterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SpectralError, LinAlgError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"wrote {', '.join(manifest.outputs)} to {cfg.out} in {manifest.wall_clock_s:.1f} s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
