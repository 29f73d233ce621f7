import numpy as np
import pytest

ACCEPTANCE_LINES = []


def record_criterion(num: int, desc: str, passed: bool, detail: str = "") -> None:
    tag = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    ACCEPTANCE_LINES.append(f"{tag}  criterion {num}: {desc}{suffix}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

from confdg.basis import dg_space
from confdg.mesh import base_mesh, refine


def mesh_level(level):
    m = base_mesh()
    for _ in range(level - 1):
        m = refine(m)
    return m


def eval_dg(space, dofs, t, pts):
    """Values of a DG function on element t at physical points."""
    mesh = space.mesh
    tv = mesh.triangle_vertices(t)
    J = np.column_stack((tv[1] - tv[0], tv[2] - tv[0]))
    lam12 = np.linalg.solve(J, (np.atleast_2d(pts) - tv[0]).T).T
    bary = np.column_stack((1.0 - lam12.sum(axis=1), lam12))
    return space.basis.values(bary).T @ dofs[space.elem_dofs[t]]


@pytest.fixture(scope="session")
def level3_mesh():
    return mesh_level(3)


@pytest.fixture(scope="session")
def level2_space_p1():
    m = mesh_level(2)
    return dg_space(m, 1)
