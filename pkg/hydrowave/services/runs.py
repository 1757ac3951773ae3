"""
Runs Service - maps a RunConfig to the analysis operations

Each runner builds its inputs from spec strings, executes the operation and
returns a RunOutcome: the report with verdict and provenance plus the tables
the front ends write as CSV or return as JSON.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..core.config import settings
from ..core.errors import InvalidParameter
from ..schemas.analysis import RunReport, Verdict
from ..schemas.config import RunConfig
from .catalog import associated_speed
from .commute import commute_residuals
from .density import Density
from .evolve import evolve
from .exprlang import parse_expr
from .field import CellFlag, StateField
from .grid import GridEvaluator, Rectangle
from .hodograph import HodographMap, check_wave, psystem_residual, seed_scan, solve_field, time_slices
from .pressure import PSystem
from .reporting import read_field_csv
from .solutions import family_case1, family_case2, family_case3, nutku_tower, separability_residual, wave_residuals
from .specs import (
    INIT_PRESETS,
    parse_axis,
    parse_catalog_spec,
    parse_density_spec,
    parse_domain,
    parse_init_spec,
    parse_pair,
    parse_pressure_spec,
    parse_speed_spec,
)
from .speedlaw import SpeedLaw, case1, case2, case3, constraint_residuals, derive_constraint, sample_grid, semilinear_residual

logger = logging.getLogger(__name__)

UNIT_DOMAIN = "u=1:2,v=1:2"
HODOGRAPH_DOMAIN = "u=0.5:4,v=0.5:4"
NUMERIC_WAVE_TOLERANCE = 1e-6
SLICE_DELTA = 1e-3
PSYSTEM_TOLERANCE = 1e-4


@dataclass
class Table:
    header: List[str]
    rows: List[Sequence[Any]] = field(default_factory=list)


@dataclass
class RunOutcome:
    """Report plus the tables behind it"""

    report: RunReport
    table: Optional[Table] = None
    monitors: Optional[Table] = None
    field: Optional[StateField] = None

    @property
    def passed(self) -> bool:
        return self.report.verdict == Verdict.PASS


def _verdict(ok: bool) -> Verdict:
    return Verdict.PASS if ok else Verdict.FAIL


def _domain(cfg: RunConfig, default: str) -> Rectangle:
    return parse_domain(cfg.domain or default)


def _require(value, name: str, command: str):
    if value is None:
        raise InvalidParameter(f"{command} needs --{name.replace('_', '-')}")
    return value


def _wave_tolerance(cfg: RunConfig, numeric: bool) -> float:
    if cfg.tolerance is not None:
        return cfg.tolerance
    return NUMERIC_WAVE_TOLERANCE if numeric else settings.WAVE_TOLERANCE


def _family(cfg: RunConfig) -> Tuple[Density, SpeedLaw]:
    theta1, theta2 = parse_expr(cfg.theta1), parse_expr(cfg.theta2)
    if cfg.case == 1:
        speed = case1(c0=cfg.c0, v0=cfg.v0 or 0.0, v1=cfg.v1)
        return family_case1(speed.c0, speed.v0, theta1, theta2), speed
    if cfg.case == 2:
        k0 = _require(cfg.k0, "k0", "verify --case 2")
        return family_case2(k0, theta1, theta2), case2(k0)
    k1 = _require(cfg.k1, "k1", "verify --case 3")
    return family_case3(k1, theta1, theta2), case3(k1)


def _verify_inputs(cfg: RunConfig) -> Tuple[Density, SpeedLaw]:
    if cfg.density:
        density = parse_density_spec(cfg.density)
        if cfg.speed:
            return density, parse_speed_spec(cfg.speed)
        if cfg.density.strip().lower().startswith("catalog:"):
            return density, associated_speed(*parse_catalog_spec(cfg.density))
        raise InvalidParameter("verify --density needs --speed unless the density is a catalog entry")
    if cfg.case is None:
        raise InvalidParameter("verify needs --case or --density")
    return _family(cfg)


def run_verify(cfg: RunConfig) -> RunOutcome:
    """Wave-equation residual of a solution family over a rectangle grid"""
    density, speed = _verify_inputs(cfg)
    rect = _domain(cfg, UNIT_DOMAIN)
    points = rect.points(cfg.grid)
    residuals = GridEvaluator(cfg.threads).map(lambda point: wave_residuals(density, speed, [point])[0], points)
    worst = max(residuals, default=0.0)
    tolerance = _wave_tolerance(cfg, density.numeric)

    report = RunReport(
        command="verify",
        verdict=_verdict(worst <= tolerance),
        tolerance=tolerance,
        metrics={"max_residual": worst, "points": len(points)},
        provenance={**density.describe(), "speed": speed.label(), "domain": rect.as_text(), "grid": cfg.grid},
    )
    if report.verdict == Verdict.FAIL:
        report.notes.append(f"wave residual {worst:.3e} exceeds {tolerance:.3e}")
        logger.warning(f"verify failed: residual {worst:.3e} > {tolerance:.3e}")
    rows = [(u, v, r) for (u, v), r in zip(points, residuals)]
    return RunOutcome(report, Table(["u", "v", "residual"], rows))


def run_commute(cfg: RunConfig) -> RunOutcome:
    """Commutation residual of two densities over a rectangle grid"""
    h = parse_density_spec(_require(cfg.h, "h", "commute"))
    f = parse_density_spec(_require(cfg.f, "f", "commute"))
    rect = _domain(cfg, UNIT_DOMAIN)
    points = rect.points(cfg.grid)
    residuals = GridEvaluator(cfg.threads).map(lambda point: commute_residuals(h, f, [point])[0], points)
    worst = max(residuals, default=0.0)
    if cfg.tolerance is not None:
        tolerance = cfg.tolerance
    elif h.numeric or f.numeric:
        tolerance = settings.COMMUTE_TOLERANCE_NUMERIC
    else:
        tolerance = settings.COMMUTE_TOLERANCE

    report = RunReport(
        command="commute",
        verdict=_verdict(worst <= tolerance),
        tolerance=tolerance,
        metrics={"max_residual": worst, "points": len(points)},
        provenance={"h": h.describe(), "f": f.describe(), "domain": rect.as_text(), "grid": cfg.grid},
    )
    if report.verdict == Verdict.FAIL:
        report.notes.append("flows do not commute")
        logger.warning(f"commute failed: residual {worst:.3e} > {tolerance:.3e}")
    rows = [(u, v, r) for (u, v), r in zip(points, residuals)]
    return RunOutcome(report, Table(["u", "v", "residual"], rows))


def run_constraint_check(cfg: RunConfig) -> RunOutcome:
    """Compatibility residuals of the derived constraint, plus the semilinear check of a density"""
    speed = parse_speed_spec(_require(cfg.speed, "speed", "constraint-check"))
    C = parse_expr(cfg.C) if cfg.C else None
    data = derive_constraint(speed, C)
    if cfg.perturb:
        data = data.perturbed(cfg.perturb)
    rect = _domain(cfg, UNIT_DOMAIN)
    points = sample_grid((rect.u_lo, rect.u_hi), (rect.v_lo, rect.v_hi), cfg.grid)
    r1, r2, r3 = constraint_residuals(speed, data, points, step=cfg.fd_step)
    metrics = {"r1": r1, "r2": r2, "r3": r3}
    if cfg.density:
        density = parse_density_spec(cfg.density)
        metrics["semilinear"] = semilinear_residual(speed, data, density, rect.points(cfg.grid))
    tolerance = cfg.tolerance if cfg.tolerance is not None else settings.CONSTRAINT_TOLERANCE
    worst = max(metrics.values())

    report = RunReport(
        command="constraint-check",
        verdict=_verdict(worst <= tolerance),
        tolerance=tolerance,
        metrics=metrics,
        provenance={
            "speed": speed.label(),
            "C": cfg.C or "none",
            "perturb": cfg.perturb,
            "domain": rect.as_text(),
            "grid": cfg.grid,
            "fd_step": cfg.fd_step if cfg.fd_step is not None else f"{settings.FD_STEP}*(1+|x|)",
        },
    )
    if report.verdict == Verdict.FAIL:
        logger.warning(f"constraint-check failed: {metrics}")
    return RunOutcome(report, Table(["residual", "value"], sorted(metrics.items())))


def _hodograph_inputs(cfg: RunConfig) -> Tuple[PSystem, Density]:
    p = parse_pressure_spec(_require(cfg.pressure, "pressure", "hodograph"))
    if cfg.density:
        return p, parse_density_spec(cfg.density)
    if p.name != "case2":
        raise InvalidParameter("hodograph needs --density unless the pressure is the case2 law")
    return p, family_case2(p.params["k0"], parse_expr(cfg.theta1), parse_expr(cfg.theta2))


def _field_rows(s: StateField) -> List[Sequence[Any]]:
    return [(x, u, v, flag) for x, u, v, flag in zip(s.xs, s.u, s.v, s.flags)]


def run_hodograph(cfg: RunConfig) -> RunOutcome:
    """
    Invert x = f_v, t = f_u along an x-grid and check both PDE forms

    The run fails when f misses the wave equation of the pressure, when any
    cell is flagged, or when the time slices miss the p-system.
    """
    p, density = _hodograph_inputs(cfg)
    t = _require(cfg.t, "t", "hodograph")
    xs = parse_axis(_require(cfg.x, "x", "hodograph"))
    m = HodographMap(density, _domain(cfg, HODOGRAPH_DOMAIN))
    seed = parse_pair(cfg.seed) if cfg.seed else seed_scan(m, float(xs[0]), t)

    result = solve_field(m, xs, t, seed)
    wave = check_wave(m, p, cfg.grid)
    tolerance = _wave_tolerance(cfg, density.numeric)
    metrics = {
        "wave_residual": wave,
        "cells": result.n,
        "catastrophe": int((result.flags == CellFlag.CATASTROPHE.value).sum()),
        "masked": int((result.flags == CellFlag.MASKED.value).sum()),
    }
    failures = []
    if wave > tolerance:
        failures.append(f"wave residual {wave:.3e} exceeds {tolerance:.3e}")
    if metrics["catastrophe"] or metrics["masked"]:
        failures.append(f"{metrics['catastrophe']} catastrophe and {metrics['masked']} masked cells")
    if result.n >= 5:
        slices = time_slices(m, xs, t, SLICE_DELTA, seed)
        metrics["psystem_r1"], metrics["psystem_r2"] = psystem_residual(slices, p)
        worst = max(metrics["psystem_r1"], metrics["psystem_r2"])
        if worst > PSYSTEM_TOLERANCE:
            failures.append(f"p-system residual {worst:.3e} exceeds {PSYSTEM_TOLERANCE:.3e}")

    report = RunReport(
        command="hodograph",
        verdict=_verdict(not failures),
        tolerance=tolerance,
        metrics=metrics,
        provenance={
            **density.describe(),
            "pressure": p.name,
            "pressure_params": p.params,
            "t": t,
            "x": cfg.x,
            "seed": list(seed),
            "domain": m.rect.as_text(),
        },
        notes=failures,
    )
    if failures:
        logger.warning(f"hodograph failed: {'; '.join(failures)}")
    return RunOutcome(report, Table(["x", "u", "v", "flag"], _field_rows(result)), field=result)


def _initial_field(cfg: RunConfig) -> StateField:
    init = _require(cfg.init, "init", "evolve")
    kind = init.partition(":")[0].strip().lower()
    if kind in INIT_PRESETS:
        return parse_init_spec(init, cfg.cells)
    return read_field_csv(init)


def run_evolve(cfg: RunConfig) -> RunOutcome:
    """Evolve a periodic field with LxF or LW, sampling monitored functionals"""
    p = parse_pressure_spec(_require(cfg.pressure, "pressure", "evolve"))
    initial = _initial_field(cfg)
    monitors = {spec: parse_density_spec(spec) for spec in cfg.monitor}
    result = evolve(initial, p, cfg.scheme, cfg.cfl, cfg.tend, monitors, cfg.sample_every)

    metrics: Dict[str, float] = {"steps": result.steps, "time": result.field.time, "cells": initial.n}
    for name in monitors:
        metrics[f"drift[{name}]"] = result.drift(name)
    drifts = [result.drift(name) for name in monitors]
    ok = cfg.tolerance is None or all(d <= cfg.tolerance for d in drifts)

    report = RunReport(
        command="evolve",
        verdict=_verdict(ok),
        tolerance=cfg.tolerance,
        metrics=metrics,
        provenance={
            "pressure": p.name,
            "pressure_params": p.params,
            "init": cfg.init,
            "scheme": cfg.scheme,
            "cfl": cfg.cfl,
            "tend": cfg.tend,
        },
    )
    monitor_rows = [
        (time, *(result.monitors[name][i] for name in monitors)) for i, time in enumerate(result.times)
    ]
    return RunOutcome(
        report,
        Table(["x", "u", "v", "flag"], _field_rows(result.field)),
        monitors=Table(["time", *monitors], monitor_rows) if monitors else None,
        field=result.field,
    )


def run_nutku(cfg: RunConfig) -> RunOutcome:
    """Build the separable tower and check beta*h_vv = alpha*h_uu for each member"""
    alpha, beta = parse_expr(cfg.alpha), parse_expr(cfg.beta)
    F0, G0 = parse_expr(cfg.F0), parse_expr(cfg.G0)
    rect = _domain(cfg, UNIT_DOMAIN)
    corner = parse_pair(cfg.corner) if cfg.corner else (rect.u_lo, rect.v_lo)
    tower = nutku_tower(alpha, beta, F0, G0, cfg.n, corner=corner)
    points = rect.points(cfg.grid)
    tolerance = cfg.tolerance if cfg.tolerance is not None else NUMERIC_WAVE_TOLERANCE

    metrics: Dict[str, float] = {}
    for k, member in enumerate(tower, start=1):
        exact = 0.0
        for u, v in points:
            jet = member.jet(u, v)
            lhs, rhs = beta(v) * jet.S, alpha(u) * jet.R
            exact = max(exact, abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs)))
        metrics[f"separability[H{k}]"] = exact
        metrics[f"separability_fd[H{k}]"] = separability_residual(member, alpha, beta, points, step=cfg.fd_step or 1e-2)
    worst = max(value for key, value in metrics.items() if not key.startswith("separability_fd"))

    report = RunReport(
        command="nutku",
        verdict=_verdict(worst <= tolerance),
        tolerance=tolerance,
        metrics=metrics,
        provenance={
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "F0": cfg.F0,
            "G0": cfg.G0,
            "n": cfg.n,
            "corner": list(corner),
            "domain": rect.as_text(),
        },
    )
    rows = [(u, v, *(member.value(u, v) for member in tower)) for u, v in points]
    return RunOutcome(report, Table(["u", "v", *(f"H{k}" for k in range(1, cfg.n + 1))], rows))


RUNNERS: Dict[str, Callable[[RunConfig], RunOutcome]] = {
    "verify": run_verify,
    "commute": run_commute,
    "constraint-check": run_constraint_check,
    "hodograph": run_hodograph,
    "evolve": run_evolve,
    "nutku": run_nutku,
}


def run(cfg: RunConfig) -> RunOutcome:
    """Execute the operation ``cfg.command`` maps to"""
    logger.info(f"Running {cfg.command}")
    outcome = RUNNERS[cfg.command](cfg)
    logger.info(f"{cfg.command} finished: {outcome.report.verdict.value}")
    return outcome
