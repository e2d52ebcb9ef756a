"""Command-line front end for benchmark runs and diagnostics.

Subcommands
-----------
run
    Solve one case at one resolution and write fields/summary.
converge
    Run a resolution ladder and write the convergence table.
check-quadrature
    Dump per-node quadrature diagnostics for a cloud.
sweep
    Inclusion contrast sweep with centerline profiles.

Exit codes: 0 on success, 2 bad configuration, 3 quadrature failure,
4 assembly failure, 5 solver failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import driver
from .errors import EXIT_OK, PerilpsError
from .pointcloud import build_neighborhoods, generate_perturbed_lattice
from .quadrature import compute_family


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta-factor", type=float, default=3.5,
                   help="horizon in units of h (default 3.5)")
    p.add_argument("--perturb", type=float, default=0.2,
                   help="jitter amplitude in units of h (default 0.2)")
    p.add_argument("--grid", choices=driver.GRIDS, default="perturbed")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--nu", type=float, default=None,
                   help="Poisson ratio for single-phase cases")
    p.add_argument("--nu1", type=float, default=0.25)
    p.add_argument("--nu2", type=float, default=0.25)
    p.add_argument("--k1", type=float, default=2.0,
                   help="2D bulk modulus of the inclusion phase")
    p.add_argument("--k2", type=float, default=1.0,
                   help="2D bulk modulus of the matrix phase")
    p.add_argument("--mu-ratio", type=float, default=None,
                   help="shear contrast mu2/mu1 (overrides k1/k2/nu1/nu2)")
    p.add_argument("--strict-vh", action="store_true",
                   help="drop the dilatation constraints from the quadrature")
    p.add_argument("--out", type=Path, required=True)


def _config_from(args: argparse.Namespace, case: str, n: int) -> driver.RunConfig:
    return driver.RunConfig(
        case=case,
        n=n,
        delta_factor=args.delta_factor,
        perturb=args.perturb,
        grid=args.grid,
        seed=args.seed,
        nu=args.nu,
        nu1=args.nu1,
        nu2=args.nu2,
        k1=args.k1,
        k2=args.k2,
        mu_ratio=args.mu_ratio,
        strict_vh=args.strict_vh,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perilps",
        description="Meshfree peridynamic benchmarks on the unit square",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one case at one resolution")
    p_run.add_argument("--case", choices=driver.CASES, required=True)
    p_run.add_argument("--n", type=int, required=True)
    _add_common(p_run)

    p_conv = sub.add_parser("converge", help="run a resolution ladder")
    p_conv.add_argument("--case", choices=driver.CASES, required=True)
    p_conv.add_argument("--n-list", type=_int_list, required=True,
                        help="comma-separated resolutions, e.g. 24,48,96")
    _add_common(p_conv)

    p_chk = sub.add_parser("check-quadrature",
                           help="dump per-node quadrature diagnostics")
    p_chk.add_argument("--n", type=int, required=True)
    p_chk.add_argument("--seed", type=int, default=7)
    p_chk.add_argument("--delta-factor", type=float, default=3.5)
    p_chk.add_argument("--perturb", type=float, default=0.2)
    p_chk.add_argument("--strict-vh", action="store_true")
    p_chk.add_argument("--out", type=Path, required=True)

    p_sw = sub.add_parser("sweep", help="inclusion shear-contrast sweep")
    p_sw.add_argument("--ratios", type=_float_list,
                      default=[0.015625, 0.125, 1.0, 8.0, 64.0],
                      help="comma-separated mu2/mu1 values")
    p_sw.add_argument("--n", type=int, default=64)
    _add_common(p_sw)

    return parser


def _cmd_run(args) -> int:
    config = _config_from(args, args.case, args.n)
    result = driver.run_case(config, out=args.out)
    print(
        f"{config.case} n={config.n}: N_interior={result.n_interior} "
        f"rms_error={result.rms_error:.6e} "
        f"residual={result.solve_report.residual:.3e} "
        f"({result.wall_time:.2f}s)"
    )
    return EXIT_OK


def _cmd_converge(args) -> int:
    config = _config_from(args, args.case, args.n_list[0])
    report = driver.convergence_ladder(config, args.n_list, out=args.out)
    for n, h, err in zip(report.n_values, report.h_values, report.rms_errors):
        print(f"n={n:4d} h={h:.6f} rms_error={err:.6e}")
    if report.slope is not None:
        print(f"slope={report.slope:.3f}")
    return EXIT_OK


def _cmd_check_quadrature(args) -> int:
    cloud = generate_perturbed_lattice(
        n=args.n,
        delta_factor=args.delta_factor,
        perturb_frac=args.perturb,
        seed=args.seed,
    )
    nbrs = build_neighborhoods(cloud)
    family = compute_family(cloud, nbrs, include_dilatation=not args.strict_vh)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["node,x,y,n_neighbors,residual,rank,min_weight,max_weight"]
    for i in np.nonzero(family.computed)[0]:
        lines.append(
            ",".join(
                [
                    str(int(i)),
                    repr(float(cloud.positions[i, 0])),
                    repr(float(cloud.positions[i, 1])),
                    str(int(family.n_neighbors[i])),
                    repr(float(family.residual[i])),
                    str(int(family.rank[i])),
                    repr(float(family.min_weight[i])),
                    repr(float(family.max_weight[i])),
                ]
            )
        )
    (out / "quadrature_check.csv").write_text("\n".join(lines) + "\n")

    computed = family.computed
    print(
        f"nodes checked: {int(computed.sum())} / {cloud.n_points}  "
        f"max residual: {float(np.nanmax(family.residual)):.3e}  "
        f"neighbor range: [{int(family.n_neighbors[computed].min())}, "
        f"{int(family.n_neighbors[computed].max())}]"
    )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = driver.RunConfig(
        case="inclusion",
        n=args.n,
        delta_factor=args.delta_factor,
        perturb=args.perturb,
        grid=args.grid,
        seed=args.seed,
    )
    out = driver.sweep_contrast(config, args.ratios, out=args.out)
    for entry in out["entries"]:
        print(
            f"ratio={entry['ratio']:<12g} profile_rms={entry['profile_rms']:.6e} "
            f"max|u|={entry['max_abs_u']:.6e}"
        )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "converge": _cmd_converge,
        "check-quadrature": _cmd_check_quadrature,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except PerilpsError as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
