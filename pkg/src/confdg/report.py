"""Rendering of convergence reports: CSV, markdown and convergence figures."""
from __future__ import annotations

import numpy as np

from .analysis import ErrorRecord

CSV_HEADER = "level,h,ndof,l2_error,l2_rate,energy_error,energy_rate,cg_iters,assemble_ms,solve_ms"


def _sci(x: float) -> str:
    return f"{x:.3e}"  # 4 significant digits


def _rate(r: float | None) -> str:
    return "" if r is None else f"{r:.2f}"


def _ms(x: float | None, deterministic: bool) -> str:
    if x is None:
        return ""
    return "0.0" if deterministic else f"{x:.1f}"


def _row(r: ErrorRecord, deterministic: bool) -> list[str]:
    return [
        str(r.level), _sci(r.h), str(r.ndof),
        _sci(r.l2_error), _rate(r.l2_rate),
        _sci(r.energy_error), _rate(r.energy_rate),
        "" if r.cg_iters is None else str(r.cg_iters),
        _ms(r.assemble_ms, deterministic),
        _ms(r.solve_ms, deterministic),
    ]


def format_csv(records: list[ErrorRecord], deterministic: bool = False) -> str:
    lines = [CSV_HEADER]
    lines += [",".join(_row(r, deterministic)) for r in records]
    return "\n".join(lines) + "\n"


def format_markdown(records: list[ErrorRecord], deterministic: bool = False) -> str:
    cols = CSV_HEADER.split(",")
    lines = ["| " + " | ".join(cols) + " |",
             "|" + "---|" * len(cols)]
    lines += ["| " + " | ".join(_row(r, deterministic)) + " |" for r in records]
    return "\n".join(lines) + "\n"


def plot_convergence(records: list[ErrorRecord], path: str,
                     degree: int, problem: str) -> None:
    """Semilog plot of both error norms against the level, with reference slopes."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    levels = np.array([r.level for r in records])
    l2 = np.array([r.l2_error for r in records])
    en = np.array([r.energy_error for r in records])

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.semilogy(levels, l2, "o-", label=r"$\|u-u_h\|$", base=2)
    ax.semilogy(levels, en, "s-", label=r"$|||u_h - I_h u|||$", base=2)
    for err, order, style in ((l2, degree + 1, "--"), (en, degree, ":")):
        if err[-1] > 0:
            ref = err[-1] * 2.0 ** (order * (levels[-1] - levels))
            ax.semilogy(levels, ref, "k" + style, lw=0.8,
                        label=rf"$O(h^{{{order}}})$", base=2)
    ax.set_xlabel("refinement level")
    ax.set_ylabel("error")
    ax.set_xticks(levels)
    ax.set_title(f"P{degree} elements, problem '{problem}'")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
