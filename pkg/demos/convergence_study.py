"""Convergence ladders for the manufactured-solution cases.

Runs the quadratic patch field (solved to round-off at every resolution)
and the trigonometric field (second-order convergence), printing one
table per case.  Artifacts land in demos/out/convergence/.

    python3 demos/convergence_study.py [--full]

The default ladder tops out at n=48 and takes well under a minute;
--full appends n=96 for the published-resolution ladder.
"""

import argparse
from pathlib import Path

from perilps.driver import RunConfig, convergence_ladder, reference_errors


def show(case: str, n_values: list[int], out: Path) -> None:
    config = RunConfig(case=case, n=n_values[0])
    report = convergence_ladder(config, n_values, out=out / case)
    refs = reference_errors(config)
    print(f"\n{case}:")
    print(f"  {'n':>4} {'h':>10} {'interior':>9} {'rms error':>12} {'reference':>12}")
    for n, h, ni, err in zip(
        report.n_values, report.h_values, report.n_interior, report.rms_errors
    ):
        ref = refs.get(str(n))
        ref_txt = f"{ref:12.3e}" if ref is not None else " " * 12
        print(f"  {n:>4} {h:>10.5f} {ni:>9} {err:>12.3e} {ref_txt}")
    if max(report.rms_errors) < 1e-12:
        print("  errors at round-off, no rate to fit")
    else:
        if report.slope is not None:
            print(f"  fitted slope: {report.slope:.3f}")
        print(f"  pair orders: {', '.join(f'{p:.3f}' for p in report.pair_orders)}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full", action="store_true",
                        help="extend the ladders to n=96")
    parser.add_argument("--out", type=Path, default=Path("demos/out/convergence"))
    args = parser.parse_args()

    ns = [12, 24, 48] + ([96] if args.full else [])
    show("patch", ns, args.out)
    show("smooth", ns, args.out)
    show("smooth-nearinc", ns, args.out)


if __name__ == "__main__":
    main()
