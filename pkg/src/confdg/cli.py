"""Command line interface.

Subcommands:
  solve     run a convergence study and write a CSV/markdown report,
            optionally rendering a convergence figure next to it
  check     run the structural invariant suite (exit 4 on failure)
  problems  list the available manufactured problems

Exit codes: 0 success, 2 bad configuration, 3 solver failure,
4 invariant-suite failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import norm_equivalence_probe, energy_norm
from .assembly import assemble, stencil_check
from .basis import dg_space, interpolate
from .mesh import base_mesh, refine
from .problems import get_problem, list_problems
from .report import format_csv, format_markdown, plot_convergence
from .solver import pcg
from .study import StudyConfig, StudyError, run_study
from .weakgrad import WeakGradientFactory, apply_weak_gradient

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_SOLVER_FAILURE = 3
EXIT_INVARIANT_FAILURE = 4


def _parse_levels(spec: str) -> tuple[int, int]:
    if ".." in spec:
        a, b = spec.split("..", 1)
        return int(a), int(b)
    v = int(spec)
    return v, v


def _read_config(path: str) -> dict[str, str]:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="confdg",
                                     description="Conforming DG Poisson solver")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="run a convergence study")
    ps.add_argument("--degree", type=int, default=None)
    ps.add_argument("--levels", default=None, help="A..B or a single level")
    ps.add_argument("--problem", default=None)
    ps.add_argument("--tol", type=float, default=None)
    ps.add_argument("--quadrature-bump", type=int, default=None)
    ps.add_argument("--format", dest="fmt", choices=["csv", "markdown"], default=None)
    ps.add_argument("--out", default=None, help="report path (default: stdout)")
    ps.add_argument("--plot", default=None, nargs="?", const="",
                    help="write a convergence figure (default: next to --out)")
    ps.add_argument("--deterministic", action="store_true")
    ps.add_argument("--config", default=None, help="key = value config file")

    pc = sub.add_parser("check", help="run the invariant suite")
    pc.add_argument("--level", type=int, default=3)
    pc.add_argument("--seed", type=int, default=1234)

    sub.add_parser("problems", help="list problem ids")
    return parser


def _config_from_args(args) -> StudyConfig:
    cfg = StudyConfig()
    if args.config:
        file_vals = _read_config(args.config)
        casts = {"degree": int, "min_level": int, "max_level": int,
                 "problem": str, "tol": float, "quadrature_bump": int,
                 "format": str, "out": str, "plot": str,
                 "deterministic": lambda s: s.lower() in ("1", "true", "yes")}
        for key, val in file_vals.items():
            if key == "levels":
                cfg.min_level, cfg.max_level = _parse_levels(val)
            elif key in casts:
                attr = "fmt" if key == "format" else key
                setattr(cfg, attr, casts[key](val))
            else:
                raise ValueError(f"unknown config key {key!r}")
    if args.degree is not None:
        cfg.degree = args.degree
    if args.levels is not None:
        cfg.min_level, cfg.max_level = _parse_levels(args.levels)
    if args.problem is not None:
        cfg.problem = args.problem
    if args.tol is not None:
        cfg.tol = args.tol
    if args.quadrature_bump is not None:
        cfg.quadrature_bump = args.quadrature_bump
    if args.fmt is not None:
        cfg.fmt = args.fmt
    if args.out is not None:
        cfg.out = args.out
    if args.plot is not None:
        cfg.plot = args.plot
    if args.deterministic:
        cfg.deterministic = True
    return cfg


def _cmd_solve(args) -> int:
    try:
        cfg = _config_from_args(args)
        cfg.validate()
        get_problem(cfg.problem, cfg.degree)
    except (ValueError, KeyError, OSError) as exc:
        print(f"confdg: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    try:
        records = run_study(cfg)
    except StudyError as exc:
        print(f"confdg: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE

    render = format_csv if cfg.fmt == "csv" else format_markdown
    text = render(records, deterministic=cfg.deterministic)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)

    if cfg.plot is not None:
        path = cfg.plot
        if not path:
            if not cfg.out:
                print("confdg: --plot without a path requires --out", file=sys.stderr)
                return EXIT_BAD_CONFIG
            path = str(Path(cfg.out).with_suffix(".png"))
        plot_convergence(records, path, cfg.degree, cfg.problem)
    return EXIT_OK


def run_invariant_suite(level: int = 3, seed: int = 1234, out=sys.stdout) -> bool:
    """Fast structural checks; returns True when everything passes."""
    rng = np.random.default_rng(seed)
    ok = True

    def report(name, passed):
        nonlocal ok
        ok = ok and passed
        out.write(f"{'PASS' if passed else 'FAIL'}  {name}\n")

    mesh = base_mesh()
    for _ in range(level - 1):
        mesh = refine(mesh)

    # Weak gradient of continuous interpolants equals the true gradient.
    worst = 0.0
    for k in (1, 2, 3):
        space = dg_space(mesh, k)
        factory = WeakGradientFactory(mesh, space)
        for _ in range(5):
            cx, cy, c0 = rng.uniform(-1, 1, 3)
            v = interpolate(space, lambda x, y: c0 + cx * x + cy * y)
            for t in range(mesh.n_triangles):
                op = factory.operator(t)
                pts = factory.vol_rule.points @ mesh.triangle_vertices(t)
                g = apply_weak_gradient(op, v[op.patch_dofs], pts)
                worst = max(worst, np.abs(g - [cx, cy]).max())
    report(f"weak gradient consistency on linears (max dev {worst:.2e})", worst < 1e-10)

    space = dg_space(mesh, 1)
    factory = WeakGradientFactory(mesh, space)
    problem = get_problem("sinsin")
    system = assemble(mesh, space, problem.f, problem.g, factory=factory)
    report("reduced matrix exactly symmetric", (system.A - system.A.T).nnz == 0)

    try:
        pcg(system.A, system.b, tol=1e-12)
        spd_ok = True
    except Exception:
        spd_ok = False
    report("CG converges with positive curvature (SPD)", spd_ok)

    stencil = stencil_check(system)
    report(f"stencil within adjacency distance 2 (max nnz/row {stencil['max_nnz_per_row']})",
           stencil["coupling_within_distance_2"] and stencil["min_diagonal"] > 0)

    positive = True
    for _ in range(200):
        v = rng.uniform(-1, 1, space.n_dofs)
        v[space.boundary_mask] = 0.0
        positive = positive and energy_norm(space, factory, v) > 0
    report("energy norm positive on 200 random nonzero functions", positive)

    lo1, hi1 = norm_equivalence_probe(space, factory, samples=40, seed=seed)
    mesh2 = refine(mesh)
    space2 = dg_space(mesh2, 1)
    factory2 = WeakGradientFactory(mesh2, space2)
    lo2, hi2 = norm_equivalence_probe(space2, factory2, samples=40, seed=seed)
    drift = max(lo1 / lo2, lo2 / lo1, hi1 / hi2, hi2 / hi1)
    report(f"norm equivalence stable under refinement "
           f"(ratios [{lo1:.3f},{hi1:.3f}] -> [{lo2:.3f},{hi2:.3f}])", drift < 2.0)
    return ok


def _cmd_check(args) -> int:
    ok = run_invariant_suite(level=args.level, seed=args.seed)
    return EXIT_OK if ok else EXIT_INVARIANT_FAILURE


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "check":
        return _cmd_check(args)
    if args.command == "problems":
        for name in list_problems():
            print(name)
        return EXIT_OK
    return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
