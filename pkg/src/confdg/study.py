"""Convergence study driver: mesh sequence -> assemble -> solve -> errors.

The reported columns are the L2 and energy distances between the computed
solution and the degree-k interpolant of the exact solution, matching the
layout of the reference convergence tables.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from .analysis import ErrorRecord, convergence_rates, energy_error, l2_interp_error
from .assembly import assemble
from .basis import MAX_DEGREE, MIN_DEGREE, dg_space
from .mesh import base_mesh, refine
from .problems import get_problem
from .solver import solve_spd
from .weakgrad import WeakGradientFactory

MAX_LEVEL = 9


@dataclass
class StudyConfig:
    degree: int = 1
    min_level: int = 1
    max_level: int = 4
    problem: str = "sinsin"
    tol: float = 1e-13
    quadrature_bump: int = 0
    fmt: str = "csv"
    out: str | None = None
    plot: str | None = None
    deterministic: bool = False

    def validate(self) -> None:
        if not MIN_DEGREE <= self.degree <= MAX_DEGREE:
            raise ValueError(f"degree must be in [{MIN_DEGREE}, {MAX_DEGREE}]")
        if not 1 <= self.min_level <= self.max_level <= MAX_LEVEL:
            raise ValueError(f"need 1 <= min_level <= max_level <= {MAX_LEVEL}")
        if self.fmt not in ("csv", "markdown"):
            raise ValueError("format must be csv or markdown")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


class StudyError(RuntimeError):
    """Solver failure during a study; names the offending level."""

    def __init__(self, level: int, cause: Exception):
        super().__init__(f"solve failed at level {level}: {cause}")
        self.level = level


def run_study(cfg: StudyConfig) -> list[ErrorRecord]:
    """One ErrorRecord per level from min_level to max_level, rates filled in."""
    cfg.validate()
    k = cfg.degree
    problem = get_problem(cfg.problem, k)
    bump = cfg.quadrature_bump

    records: list[ErrorRecord] = []
    mesh = base_mesh()
    for level in range(1, cfg.max_level + 1):
        if level > 1:
            mesh = refine(mesh)
        if level < cfg.min_level:
            continue
        space = dg_space(mesh, k)
        factory = WeakGradientFactory(mesh, space,
                                      vol_degree=2 * k + 2 + bump,
                                      edge_degree=2 * k + 1 + bump)
        t0 = time.perf_counter()
        system = assemble(mesh, space, problem.f, problem.g, factory=factory,
                          load_degree=2 * k + 4 + bump)
        assemble_ms = 1e3 * (time.perf_counter() - t0)
        try:
            u_h, rep = solve_spd(system, tol=cfg.tol)
        except Exception as exc:
            raise StudyError(level, exc) from exc
        records.append(ErrorRecord(
            level=level, h=mesh.h, ndof=space.n_dofs,
            l2_error=l2_interp_error(space, u_h, problem.u),
            energy_error=energy_error(space, factory, u_h, problem.u),
            cg_iters=rep.iterations,
            assemble_ms=assemble_ms,
            solve_ms=1e3 * rep.wall_time,
        ))
    return convergence_rates(records)
