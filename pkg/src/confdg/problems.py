"""Manufactured Poisson problems on the unit square."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Problem:
    """Exact solution u, source f = -laplace(u) and boundary data g = u."""

    name: str
    u: callable
    f: callable
    g: callable
    note: str = ""


def _sinsin() -> Problem:
    pi = np.pi
    return Problem(
        name="sinsin",
        u=lambda x, y: np.sin(pi * x) * np.sin(pi * y),
        f=lambda x, y: 2 * pi ** 2 * np.sin(pi * x) * np.sin(pi * y),
        g=lambda x, y: 0.0 * x,
        note="smooth benchmark, homogeneous Dirichlet data",
    )


def _linear() -> Problem:
    return Problem(
        name="linear",
        u=lambda x, y: x + y,
        f=lambda x, y: 0.0 * x,
        g=lambda x, y: x + y,
        note="harmonic linear solution; exactly reproducible for every degree",
    )


def _polyk(k: int) -> Problem:
    c = -k * (k - 1)
    return Problem(
        name="polyk",
        u=lambda x, y: (x + y) ** k,
        f=lambda x, y: 2.0 * c * (x + y) ** (k - 2) if k >= 2 else 0.0 * x,
        g=lambda x, y: (x + y) ** k,
        note=f"degree-{k} polynomial solution; in the discrete space",
    )


def list_problems() -> list[str]:
    return ["sinsin", "linear", "polyk"]


def get_problem(name: str, degree: int = 1) -> Problem:
    """Look up a problem by id; ``polyk`` depends on the configured degree."""
    if name == "sinsin":
        return _sinsin()
    if name == "linear":
        return _linear()
    if name == "polyk":
        return _polyk(degree)
    raise KeyError(f"unknown problem {name!r}; known: {', '.join(list_problems())}")
