"""Benchmark orchestration: single runs, convergence ladders, sweeps.

A run is configuration in, certified solution plus error report out,
with optional CSV/JSON artifacts.  All randomness flows from the single
seed in the configuration, and the output writers format numbers with
``repr``, so identical configurations produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import analytic
from .analytic import AnalyticCase, ElasticModuli, HoleParams, InclusionParams
from .errors import ConfigError
from .model import (
    BondSet,
    LpsConstants,
    MaterialField,
    assemble_system,
    break_bonds_crossing_circle,
    hole_removal_mask,
    compute_moment_tensors,
    damage_field,
)
from .pointcloud import (
    Disk,
    DomainSpec,
    PointCloud,
    build_neighborhoods,
    generate_perturbed_lattice,
)
from .quadrature import KernelSpec, compute_family
from .solver import SolveReport, rms_norm, solve

__all__ = [
    "CASES",
    "RunConfig",
    "RunResult",
    "ConvergenceReport",
    "run_case",
    "convergence_ladder",
    "sweep_contrast",
    "reference_errors",
]

CASES = ("patch", "smooth", "smooth-nearinc", "hole", "inclusion")

GRIDS = ("perturbed", "uniform")

#: Published RMS errors of the originating convergence study, keyed by
#: case (and grid / outer Poisson ratio for the inclusion tables).
#: Embedded in summaries so a run can be eyeballed against them.
_REFERENCE_ERRORS = {
    ("patch", None): {24: 4.11e-14, 48: 2.47e-13, 96: 2.69e-12, 192: 4.01e-13},
    ("smooth", None): {24: 0.02207, 48: 0.00506, 96: 0.00117, 192: 0.00028},
    ("smooth-nearinc", None): {24: 0.13057, 48: 0.02597, 96: 0.00632, 192: 0.00158},
    ("inclusion", ("uniform", 0.25)): {
        16: 0.00569, 32: 0.00201, 64: 0.00099, 128: 0.00045, 256: 0.00023,
    },
    ("inclusion", ("uniform", 0.49)): {
        16: 0.04463, 32: 0.03926, 64: 0.02260, 128: 0.01205, 256: 0.00595,
    },
    ("inclusion", ("perturbed", 0.25)): {
        16: 0.00661, 32: 0.00242, 64: 0.00144, 128: 0.00055, 256: 0.00044,
    },
    ("inclusion", ("perturbed", 0.49)): {
        16: 0.04629, 32: 0.03941, 64: 0.02304, 128: 0.01211, 256: 0.00614,
    },
}

FIELDS_HEADER = "x,y,ux,uy,theta,damage,ux_exact,uy_exact,err"

CONVERGENCE_HEADER = "n,h,N_interior,rms_error"


@dataclass(frozen=True)
class RunConfig:
    """Everything a single benchmark run depends on."""

    case: str
    n: int
    delta_factor: float = 3.5
    perturb: float = 0.2
    grid: str = "perturbed"
    seed: int = 7
    nu: float | None = None
    nu1: float = 0.25
    nu2: float = 0.25
    k1: float = 2.0
    k2: float = 1.0
    mu_ratio: float | None = None
    strict_vh: bool = False
    solver_method: str = "direct"

    def __post_init__(self):
        if self.case not in CASES:
            raise ConfigError(f"unknown case {self.case!r}; choose from {CASES}")
        if self.grid not in GRIDS:
            raise ConfigError(f"unknown grid {self.grid!r}; choose from {GRIDS}")
        if self.n <= 0:
            raise ConfigError(f"n must be positive, got {self.n}")

    @property
    def effective_perturb(self) -> float:
        return 0.0 if self.grid == "uniform" else self.perturb


@dataclass
class RunResult:
    config: RunConfig
    case: AnalyticCase
    cloud: PointCloud
    u: np.ndarray
    theta: np.ndarray
    damage: np.ndarray
    u_exact: np.ndarray
    report_mask: np.ndarray
    rms_error: float
    solve_report: SolveReport
    wall_time: float

    @property
    def n_interior(self) -> int:
        return int(self.report_mask.sum())


@dataclass
class ConvergenceReport:
    config: RunConfig
    n_values: list[int]
    h_values: list[float]
    n_interior: list[int]
    rms_errors: list[float]
    slope: float | None
    pair_orders: list[float]
    wall_times: list[float]
    runs: list[RunResult] = field(default_factory=list)


def _inclusion_params(config: RunConfig) -> InclusionParams:
    if config.mu_ratio is not None:
        if config.mu_ratio <= 0.0:
            raise ConfigError(f"mu ratio must be positive, got {config.mu_ratio}")
        # Fix nu = 1/4 in both phases and mu = 1 inside, so the 2D bulk
        # modulus is twice the shear modulus in each phase.
        inner = analytic.moduli_from_K_nu(2.0, 0.25)
        outer = analytic.moduli_from_K_nu(2.0 * config.mu_ratio, 0.25)
    else:
        inner = analytic.moduli_from_K_nu(config.k1, config.nu1)
        outer = analytic.moduli_from_K_nu(config.k2, config.nu2)
    return InclusionParams(inner=inner, outer=outer)


def _build_case(config: RunConfig) -> tuple[AnalyticCase, DomainSpec]:
    if config.case == "patch":
        return analytic.make_patch_case(), DomainSpec()
    if config.case == "smooth":
        moduli = ElasticModuli(lam=0.5, mu=0.5)
        case = analytic.make_smooth_case(moduli, frequency=math.pi)
        return case, DomainSpec()
    if config.case == "smooth-nearinc":
        nu = config.nu if config.nu is not None else 0.495
        moduli = analytic.moduli_from_E_nu(1.0, nu)
        case = analytic.make_smooth_case(
            moduli, tag="smooth-nearinc", frequency=math.pi
        )
        return case, DomainSpec()
    if config.case == "hole":
        nu = config.nu if config.nu is not None else 0.25
        params = HoleParams(moduli=analytic.moduli_from_E_nu(1.0, nu))
        disk = Disk(center=params.center, radius=params.radius)
        return analytic.make_hole_case(params), DomainSpec(hole=disk)
    if config.case == "inclusion":
        params = _inclusion_params(config)
        disk = Disk(center=params.center, radius=params.radius)
        return analytic.make_inclusion_case(params), DomainSpec(inclusion=disk)
    raise ConfigError(f"unknown case {config.case!r}")


def reference_errors(config: RunConfig) -> dict[str, float]:
    """Published errors matching this configuration, keyed by resolution."""
    key = None
    if config.case == "inclusion":
        if config.mu_ratio is None and abs(config.nu1 - 0.25) < 1e-12:
            for nu2 in (0.25, 0.49):
                if abs(config.nu2 - nu2) < 1e-12:
                    key = ("inclusion", (config.grid, nu2))
    elif config.case in ("patch", "smooth", "smooth-nearinc"):
        if config.grid == "perturbed":
            key = (config.case, None)
    table = _REFERENCE_ERRORS.get(key, {})
    return {str(n): v for n, v in sorted(table.items())}


def run_case(config: RunConfig, out: Path | str | None = None) -> RunResult:
    """Execute one benchmark: cloud, weights, system, solve, errors.

    With ``out`` set, writes ``fields.csv`` (interior nodes) and
    ``summary.json`` into that directory.
    """
    t0 = time.perf_counter()
    case, spec = _build_case(config)
    cloud = generate_perturbed_lattice(
        n=config.n,
        delta_factor=config.delta_factor,
        perturb_frac=config.effective_perturb,
        seed=config.seed,
        spec=spec,
    )
    nbrs = build_neighborhoods(cloud)
    kernel = KernelSpec(delta=cloud.delta)
    family = compute_family(
        cloud, nbrs, kernel, include_dilatation=not config.strict_vh
    )

    bonds = BondSet.intact(nbrs)
    if spec.hole is not None:
        bonds = break_bonds_crossing_circle(bonds, nbrs, cloud, spec.hole)
        bonds = bonds.with_present(~hole_removal_mask(cloud, spec.hole))

    constants = LpsConstants.plane_strain()
    material = MaterialField.from_case(case, cloud)
    correction = compute_moment_tensors(cloud, nbrs, family, bonds, constants)

    positions = cloud.positions
    u_exact = case.displacement(positions)
    forcing = case.forcing(positions)
    system = assemble_system(
        cloud, nbrs, family, bonds, material, constants, correction,
        dirichlet=u_exact, forcing=forcing,
    )
    report = solve(system, method=config.solver_method)

    u = system.extract_u(report.x)
    theta = system.extract_theta(report.x)
    damage = damage_field(bonds, family, nbrs)

    mask = cloud.interior & bonds.present
    rms_error = rms_norm(u[mask] - u_exact[mask])
    wall = time.perf_counter() - t0

    result = RunResult(
        config=config,
        case=case,
        cloud=cloud,
        u=u,
        theta=theta,
        damage=damage,
        u_exact=u_exact,
        report_mask=mask,
        rms_error=rms_error,
        solve_report=report,
        wall_time=wall,
    )
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        _write_fields(out / "fields.csv", result)
        _write_summary(out / "summary.json", result)
    return result


def convergence_ladder(
    config: RunConfig, n_values: list[int], out: Path | str | None = None
) -> ConvergenceReport:
    """Run the same case over increasing resolutions and fit the rate.

    Each rung is an ordinary :func:`run_case` with the same seed (the
    jitter pattern is resolution-dependent but reproducible).  With
    ``out`` set, per-rung artifacts land in ``out/n{n}/`` and the
    ladder writes ``convergence.csv`` and an aggregate ``summary.json``.
    """
    if len(n_values) < 2:
        raise ConfigError("a convergence ladder needs at least two resolutions")
    if sorted(n_values) != list(n_values):
        raise ConfigError("resolutions must be listed in increasing order")

    out_path = Path(out) if out is not None else None
    runs: list[RunResult] = []
    for n in n_values:
        cfg = replace(config, n=n)
        sub = out_path / f"n{n:03d}" if out_path is not None else None
        runs.append(run_case(cfg, out=sub))

    hs = [r.cloud.h for r in runs]
    errs = [r.rms_error for r in runs]
    pair_orders = [
        math.log(errs[k] / errs[k + 1]) / math.log(hs[k] / hs[k + 1])
        if errs[k + 1] > 0.0 and errs[k] > 0.0
        else math.nan
        for k in range(len(runs) - 1)
    ]
    slope = None
    if len(runs) >= 3 and all(e > 0.0 for e in errs):
        slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])

    report = ConvergenceReport(
        config=config,
        n_values=list(n_values),
        h_values=hs,
        n_interior=[r.n_interior for r in runs],
        rms_errors=errs,
        slope=slope,
        pair_orders=pair_orders,
        wall_times=[r.wall_time for r in runs],
        runs=runs,
    )
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
        _write_convergence(out_path / "convergence.csv", report)
        _write_summary(out_path / "summary.json", runs[-1], slope=slope)
    return report


def sweep_contrast(
    config: RunConfig, ratios: list[float], out: Path | str | None = None
) -> dict:
    """Inclusion runs over a range of shear contrasts, with profiles.

    For each ratio the inclusion case is solved at the configured
    resolution and the x-displacement along the lattice row nearest the
    horizontal centerline is extracted next to its analytic overlay.

    Returns a dict with per-ratio profile arrays and summary numbers.
    """
    if not ratios:
        raise ConfigError("sweep needs at least one contrast ratio")
    out_path = Path(out) if out is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    entries = []
    for ratio in ratios:
        cfg = replace(config, case="inclusion", mu_ratio=float(ratio))
        result = run_case(cfg)
        profile = _centerline_profile(result)
        err = rms_norm(profile["ux"] - profile["ux_exact"])
        scale = float(np.abs(result.u_exact[result.report_mask]).max())
        entries.append(
            {
                "ratio": float(ratio),
                "profile": profile,
                "profile_rms": err,
                "max_abs_u": scale,
                "rms_error": result.rms_error,
            }
        )
        if out_path is not None:
            name = f"profile_ratio_{float(ratio)!r}.csv"
            _write_profile(out_path / name, profile)

    summary = {
        "case": "inclusion-sweep",
        "n": config.n,
        "ratios": [e["ratio"] for e in entries],
        "profile_rms": [e["profile_rms"] for e in entries],
        "max_abs_u": [e["max_abs_u"] for e in entries],
        "rms_error": [e["rms_error"] for e in entries],
    }
    if out_path is not None:
        with open(out_path / "sweep.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return {"entries": entries, "summary": summary}


def _centerline_profile(result: RunResult) -> dict[str, np.ndarray]:
    """x-displacement along the lattice row nearest y = 1/2.

    For even ``n`` no row of unperturbed centers sits on the centerline;
    the row just above it is used.  Values are compared at the actual
    (possibly jittered) node positions.
    """
    cloud = result.cloud
    n = result.config.n
    row = n // 2
    mask = result.report_mask & (cloud.lattice_index[:, 1] == row)
    idx = np.nonzero(mask)[0]
    return {
        "x": cloud.positions[idx, 0],
        "y": cloud.positions[idx, 1],
        "ux": result.u[idx, 0],
        "ux_exact": result.u_exact[idx, 0],
    }


# ---------------------------------------------------------------------------
# output writers (repr-formatted, so reruns are byte-identical)


def _fmt(v) -> str:
    return repr(float(v))


def _write_fields(path: Path, result: RunResult) -> None:
    idx = np.nonzero(result.report_mask)[0]
    err = np.hypot(
        result.u[idx, 0] - result.u_exact[idx, 0],
        result.u[idx, 1] - result.u_exact[idx, 1],
    )
    lines = [FIELDS_HEADER]
    for row, i in enumerate(idx):
        lines.append(
            ",".join(
                [
                    _fmt(result.cloud.positions[i, 0]),
                    _fmt(result.cloud.positions[i, 1]),
                    _fmt(result.u[i, 0]),
                    _fmt(result.u[i, 1]),
                    _fmt(result.theta[i]),
                    _fmt(result.damage[i]),
                    _fmt(result.u_exact[i, 0]),
                    _fmt(result.u_exact[i, 1]),
                    _fmt(err[row]),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n")


def _write_summary(path: Path, result: RunResult, slope: float | None = None) -> None:
    summary = {
        "case": result.config.case,
        "n": result.config.n,
        "h": result.cloud.h,
        "delta": result.cloud.delta,
        "N_interior": result.n_interior,
        "rms_error": result.rms_error,
        "solver_residual": result.solve_report.residual,
        "paper_reference_values": reference_errors(result.config),
    }
    if slope is not None:
        summary["slope"] = slope
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_convergence(path: Path, report: ConvergenceReport) -> None:
    lines = [CONVERGENCE_HEADER]
    for n, h, ni, err in zip(
        report.n_values, report.h_values, report.n_interior, report.rms_errors
    ):
        lines.append(f"{n},{_fmt(h)},{ni},{_fmt(err)}")
    path.write_text("\n".join(lines) + "\n")


def _write_profile(path: Path, profile: dict[str, np.ndarray]) -> None:
    lines = ["x,y,ux,ux_exact"]
    for k in range(len(profile["x"])):
        lines.append(
            ",".join(
                _fmt(profile[c][k]) for c in ("x", "y", "ux", "ux_exact")
            )
        )
    path.write_text("\n".join(lines) + "\n")
