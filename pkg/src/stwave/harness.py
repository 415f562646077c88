"""Convergence studies on uniformly refined meshes and the CFL demonstration."""

from __future__ import annotations

import io
import json
import logging
import math
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .assembly import assemble_load, assemble_spatial, assemble_temporal, load_plans
from .errors import eoc, error_norms, error_plans
from .exceptions import AccuracyWarning, InvalidParameterError, MemoryCeilingError, SolverError
from .linsystem import SOLVERS, KroneckerSystem, relative_residual, solve
from .mesh import mesh_stats, refine, starting_spatial_mesh, starting_temporal_mesh
from .polybasis import NODE_PLACEMENTS, LagrangeBasis
from .solutions import SOLUTIONS, get_solution

log = logging.getLogger(__name__)

CSV_HEADER = "level,dof,hx_max,hx_min,ht_max,ht_min,l2_error,l2_eoc,h1_error,h1_eoc"
FORMATS = ("csv", "markdown")
DEFAULT_MEMORY_CEILING = 8 * 1024**3


@dataclass(frozen=True)
class StudyConfig:
    degree: int = 1
    solution: str = "u1"
    levels: int = 8
    stabilised: bool = True
    node_placement: str = "gauss_lobatto"
    quad_boost: int = 0
    output: str = "csv"
    T: float = 10.0
    out_path: str | None = None
    solver: str = "march"
    memory_ceiling: int = DEFAULT_MEMORY_CEILING

    def validate(self):
        if not isinstance(self.degree, int) or not 1 <= self.degree <= 8:
            raise InvalidParameterError(f"degree must be in [1, 8], got {self.degree!r}")
        if self.solution not in SOLUTIONS:
            raise InvalidParameterError(f"unknown solution {self.solution!r}")
        if not isinstance(self.levels, int) or self.levels < 1:
            raise InvalidParameterError("levels must be a positive integer")
        if self.node_placement not in NODE_PLACEMENTS:
            raise InvalidParameterError(f"unknown node placement {self.node_placement!r}")
        if self.quad_boost < 0:
            raise InvalidParameterError("quad_boost must be non-negative")
        if self.output not in FORMATS:
            raise InvalidParameterError(f"unknown output format {self.output!r}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise InvalidParameterError("T must be positive")
        if self.solver not in SOLVERS:
            raise InvalidParameterError(f"unknown solver {self.solver!r}")
        return self


def level_counts(level: int) -> tuple[int, int]:
    """Element counts ``(N_x, N_t)`` after ``level`` uniform refinements."""
    return 2 * 2**level, 3 * 2**level


def dof_at_level(degree: int, level: int) -> int:
    nx, nt = level_counts(level)
    return (degree * nx - 1) * degree * nt


def estimate_memory(config: StudyConfig, level: int) -> int:
    """Rough peak memory in bytes of one study level.

    The global LU is bounded by band fill ``dof * (2 bw + 1)`` with
    bandwidth ``bw = (p + 1) M_x``; block marching keeps only the diagonal
    block factors and a few vectors of length dof.
    """
    p = config.degree
    nx, nt = level_counts(level)
    mx = p * nx - 1
    dof = dof_at_level(p, level)
    if config.solver == "lu":
        solver = dof * (2 * (p + 1) * mx + 1) * 8
    else:
        solver = 2 * (p * mx) * (4 * p * p + 4) * 8 + 16 * dof * 8
    # quadrature grids are processed in chunks of fixed size
    return int(solver + 12 * 2_000_000 * 8)


@dataclass
class StudyRow:
    level: int
    dof: int
    hx_max: float
    hx_min: float
    ht_max: float
    ht_min: float
    l2_error: float
    h1_error: float
    l2_eoc: float | None = None
    h1_eoc: float | None = None
    residual: float = 0.0
    seconds: float = 0.0


@dataclass
class StudyReport:
    config: StudyConfig
    rows: list[StudyRow] = field(default_factory=list)
    failure: str | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.failure is not None

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    def metadata(self) -> dict:
        return {
            "config": asdict(self.config),
            "residuals": self.column("residual"),
            "seconds": self.column("seconds"),
            "failure": self.failure,
            "warnings": self.warnings,
        }


def _fill_eoc(rows: list[StudyRow]):
    for prev, cur in zip(rows[:-1], rows[1:]):
        for attr in ("l2", "h1"):
            a, b = getattr(prev, f"{attr}_error"), getattr(cur, f"{attr}_error")
            try:
                val = eoc([a, b])[0]
            except InvalidParameterError:
                val = None
            setattr(cur, f"{attr}_eoc", val)


def run_level(config: StudyConfig, level: int, basis: LagrangeBasis, sol) -> StudyRow:
    p = config.degree
    mesh_x = refine(starting_spatial_mesh(), level)
    mesh_t = refine(starting_temporal_mesh(config.T), level)
    t0 = time.perf_counter()
    system = KroneckerSystem(
        assemble_temporal(mesh_t, basis, stabilised=config.stabilised),
        assemble_spatial(mesh_x, basis),
    )
    lx, lt = load_plans(p, T=config.T, L=mesh_x.right, singular_end=sol.singular_at_T, boost=config.quad_boost)
    rhs = assemble_load(sol.f, mesh_x, mesh_t, basis, lx, lt)
    u = solve(system, rhs, method=config.solver)
    res = relative_residual(system, u, rhs)
    ex, et = error_plans(p, T=config.T, L=mesh_x.right, singular_end=sol.singular_at_T, boost=config.quad_boost)
    with np.errstate(over="ignore", invalid="ignore"):
        err = error_norms(u, mesh_x, mesh_t, basis, sol, ex, et)
    hx_max, hx_min = mesh_stats(mesh_x)
    ht_max, ht_min = mesh_stats(mesh_t)
    return StudyRow(
        level=level,
        dof=system.dimension,
        hx_max=hx_max,
        hx_min=hx_min,
        ht_max=ht_max,
        ht_min=ht_min,
        l2_error=err.l2,
        h1_error=err.h1_semi,
        residual=res,
        seconds=time.perf_counter() - t0,
    )


def run_study(config: StudyConfig) -> StudyReport:
    """Run all levels of a convergence study.

    A solver failure ends the study early and is recorded in
    ``report.failure``; rows computed so far are kept. The memory estimate of
    the deepest level is checked before anything is allocated.
    """
    config.validate()
    need = estimate_memory(config, config.levels - 1)
    if need > config.memory_ceiling:
        raise MemoryCeilingError(
            f"level {config.levels - 1} needs about {need / 1024**3:.1f} GiB, "
            f"ceiling is {config.memory_ceiling / 1024**3:.1f} GiB"
        )
    sol = get_solution(config.solution, config.T)
    basis = LagrangeBasis(config.degree, config.node_placement)
    report = StudyReport(config)
    for level in range(config.levels):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", AccuracyWarning)
            try:
                row = run_level(config, level, basis, sol)
            except SolverError as exc:
                report.failure = f"level {level}: {exc}"
                log.warning("solver failure at level %d: %s", level, exc)
                break
        for w in caught:
            if issubclass(w.category, AccuracyWarning):
                report.warnings.append(f"level {level}: {w.message}")
        report.rows.append(row)
        log.info("level %d dof %d l2 %.3e h1 %.3e", level, row.dof, row.l2_error, row.h1_error)
    _fill_eoc(report.rows)
    if config.out_path:
        write_report(report, config.out_path, config.output)
    return report


def _fmt_eoc(v):
    if v is None:
        return "-"
    text = f"{v:.1f}"
    return "0.0" if text == "-0.0" else text


def to_csv(report: StudyReport) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in report.rows:
        fields = [
            str(r.level),
            str(r.dof),
            f"{r.hx_max:.6g}",
            f"{r.hx_min:.6g}",
            f"{r.ht_max:.6g}",
            f"{r.ht_min:.6g}",
            f"{r.l2_error:.5e}",
            _fmt_eoc(r.l2_eoc),
            f"{r.h1_error:.5e}",
            _fmt_eoc(r.h1_eoc),
        ]
        buf.write(",".join(fields) + "\n")
    return buf.getvalue()


def to_markdown(report: StudyReport) -> str:
    cfg = report.config
    lines = [
        f"p = {cfg.degree}, solution {cfg.solution}, "
        f"{'stabilised' if cfg.stabilised else 'unstabilised'}, T = {cfg.T:g}",
        "",
        "| dof | hx_max | hx_min | ht_max | ht_min | L2 error | eoc | H1 error | eoc |",
        "|---:|---:|---:|---:|---:|---:|---:|---:|---:|",
    ]
    for r in report.rows:
        lines.append(
            f"| {r.dof} | {r.hx_max:.4f} | {r.hx_min:.4f} | {r.ht_max:.4f} | {r.ht_min:.4f} "
            f"| {r.l2_error:.1e} | {_fmt_eoc(r.l2_eoc)} | {r.h1_error:.1e} | {_fmt_eoc(r.h1_eoc)} |"
        )
    if report.failure:
        lines += ["", f"**failed:** {report.failure}"]
    return "\n".join(lines) + "\n"


def write_report(report: StudyReport, path: str, fmt: str = "csv"):
    text = to_csv(report) if fmt == "csv" else to_markdown(report)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    with open(f"{path}.meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.metadata(), fh, indent=2)


# --------------------------------------------------------------------------
# CFL demonstration


@dataclass
class CFLDemoReport:
    stabilised: StudyReport
    unstabilised: StudyReport
    rate: float = 2.0
    tolerance: float = 0.5

    def _l2_eocs(self, report: StudyReport):
        return [(r.level, r.l2_eoc) for r in report.rows if r.level >= 3]

    @property
    def unstabilised_blew_up(self) -> bool:
        rep = self.unstabilised
        if rep.failed or rep.warnings:
            return True
        errs = rep.column("l2_error")
        if any(not math.isfinite(e) for e in errs):
            return True
        return any(errs[k] > errs[k - 1] for k in range(3, len(errs)))

    @property
    def unstabilised_fails_rate(self) -> bool:
        """No convergence at the expected L2 rate from level 3 on."""
        if self.unstabilised_blew_up:
            return True
        return any(v is None or abs(v - self.rate) > self.tolerance for _, v in self._l2_eocs(self.unstabilised))

    @property
    def stabilised_converges(self) -> bool:
        rows = self.stabilised.rows
        if self.stabilised.failed or len(rows) < 2 or rows[-1].l2_eoc is None:
            return False
        return abs(rows[-1].l2_eoc - self.rate) <= 0.1

    def to_markdown(self) -> str:
        lines = [
            f"CFL demonstration, p = {self.stabilised.config.degree}, solution u1",
            "",
            "| dof | ht_min / hx_max | stabilised L2 | eoc | unstabilised L2 | eoc |",
            "|---:|---:|---:|---:|---:|---:|",
        ]
        un = {r.level: r for r in self.unstabilised.rows}
        for r in self.stabilised.rows:
            u = un.get(r.level)
            u_err = f"{u.l2_error:.1e}" if u else "failed"
            u_eoc = _fmt_eoc(u.l2_eoc) if u else "-"
            lines.append(
                f"| {r.dof} | {r.ht_min / r.hx_max:.3f} | {r.l2_error:.1e} | {_fmt_eoc(r.l2_eoc)} | {u_err} | {u_eoc} |"
            )
        lines += [
            "",
            f"stabilised converges at rate {self.rate:g}: {self.stabilised_converges}",
            f"unstabilised fails the rate criterion: {self.unstabilised_fails_rate}",
        ]
        if self.unstabilised.failure:
            lines.append(f"unstabilised solver failure: {self.unstabilised.failure}")
        for w in self.unstabilised.warnings:
            lines.append(f"unstabilised warning: {w}")
        return "\n".join(lines) + "\n"


def run_cfl_demo(p: int = 1, levels: int = 8, T: float = 10.0, solver: str = "march") -> CFLDemoReport:
    """Run the u1 study with and without stabilisation on the coarse meshes.

    On every level ``ht_min / hx_max = 5/3``, so the mesh ratio never
    satisfies the CFL restriction of the unstabilised scheme.
    """
    if p != 1:
        log.warning("CFL demonstration for p = %d is experimental", p)
    base = dict(degree=p, solution="u1", levels=levels, T=T, solver=solver)
    stab = run_study(StudyConfig(stabilised=True, **base))
    with np.errstate(all="ignore"):
        unstab = run_study(StudyConfig(stabilised=False, **base))
    return CFLDemoReport(stab, unstab)
