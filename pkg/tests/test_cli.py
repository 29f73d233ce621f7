import numpy as np
import pytest

from confdg.cli import (EXIT_BAD_CONFIG, EXIT_OK, EXIT_SOLVER_FAILURE, main,
                        run_invariant_suite)
from confdg.problems import get_problem, list_problems
from confdg.report import CSV_HEADER, format_csv, format_markdown
from confdg.study import StudyConfig, StudyError, run_study


def test_list_problems():
    names = list_problems()
    assert "sinsin" in names and "linear" in names and "polyk" in names


def test_problem_definitions():
    p = get_problem("sinsin")
    assert p.u(0.5, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert p.f(0.5, 0.5) == pytest.approx(2 * np.pi ** 2, rel=1e-15)
    assert p.g(0.3, 1.0) == 0.0
    lin = get_problem("linear")
    assert lin.u(0.25, 0.5) == 0.75
    assert lin.f(0.1, 0.1) == 0.0
    poly = get_problem("polyk", degree=2)
    assert poly.u(0.5, 0.5) == 1.0
    assert poly.f(0.0, 0.0) == -4.0     # -laplace((x+y)^2)
    with pytest.raises(KeyError):
        get_problem("unknown")


def test_study_config_validation():
    with pytest.raises(ValueError):
        StudyConfig(degree=0).validate()
    with pytest.raises(ValueError):
        StudyConfig(degree=6).validate()
    with pytest.raises(ValueError):
        StudyConfig(min_level=3, max_level=2).validate()
    with pytest.raises(ValueError):
        StudyConfig(max_level=99).validate()
    with pytest.raises(ValueError):
        StudyConfig(fmt="tsv").validate()
    with pytest.raises(ValueError):
        StudyConfig(tol=-1.0).validate()
    StudyConfig(degree=3, min_level=2, max_level=4).validate()


def test_run_study_records():
    recs = run_study(StudyConfig(degree=1, min_level=2, max_level=4))
    assert [r.level for r in recs] == [2, 3, 4]
    assert recs[0].l2_rate is None and recs[1].l2_rate is not None
    assert all(r.l2_error > 0 and r.energy_error > 0 for r in recs)
    # Errors shrink under refinement.
    assert recs[2].l2_error < recs[1].l2_error < recs[0].l2_error


def _force_nonconvergence(monkeypatch):
    import confdg.study
    from confdg.solver import NonConvergenceError

    def fail(system, tol=1e-13, max_iter=None, callback=None):
        raise NonConvergenceError(1, 0.5, np.zeros(system.n_free))

    monkeypatch.setattr(confdg.study, "solve_spd", fail)


def test_run_study_raises_study_error_on_solver_failure(monkeypatch):
    _force_nonconvergence(monkeypatch)
    with pytest.raises(StudyError) as exc:
        run_study(StudyConfig(degree=1, min_level=3, max_level=3))
    assert exc.value.level == 3


def test_format_csv_and_markdown_agree():
    recs = run_study(StudyConfig(degree=1, min_level=2, max_level=3))
    csv = format_csv(recs, deterministic=True)
    md = format_markdown(recs, deterministic=True)
    lines = csv.strip().split("\n")
    assert lines[0] == CSV_HEADER
    csv_cells = [ln.split(",") for ln in lines[1:]]
    md_cells = [[c.strip() for c in ln.strip("|").split("|")]
                for ln in md.strip().split("\n")[2:]]
    assert csv_cells == md_cells
    # Deterministic mode zeroes the timing fields.
    for row in csv_cells:
        assert row[-2:] == ["0.0", "0.0"]
    # 4 significant digits in scientific notation.
    assert "e-" in csv_cells[0][3]


def test_cli_solve_writes_csv(tmp_path):
    out = tmp_path / "report.csv"
    rc = main(["solve", "--degree", "1", "--levels", "2..3",
               "--problem", "sinsin", "--deterministic", "--out", str(out)])
    assert rc == EXIT_OK
    text = out.read_text()
    assert text.startswith(CSV_HEADER + "\n")
    assert len(text.strip().split("\n")) == 3


def test_cli_solve_deterministic_byte_identical(tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        rc = main(["solve", "--degree", "2", "--levels", "2..3",
                   "--deterministic", "--out", str(out)])
        assert rc == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_cli_plot_renders_figure(tmp_path):
    out = tmp_path / "report.csv"
    rc = main(["solve", "--degree", "1", "--levels", "2..3",
               "--deterministic", "--out", str(out), "--plot"])
    assert rc == EXIT_OK
    png = tmp_path / "report.png"
    assert png.exists()
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_plot_explicit_path(tmp_path):
    fig = tmp_path / "conv.png"
    rc = main(["solve", "--degree", "1", "--levels", "2..2",
               "--deterministic", "--out", str(tmp_path / "r.csv"),
               "--plot", str(fig)])
    assert rc == EXIT_OK
    assert fig.exists()


def test_cli_plot_without_out_is_config_error(capsys):
    rc = main(["solve", "--degree", "1", "--levels", "2..2", "--plot"])
    assert rc == EXIT_BAD_CONFIG


def test_cli_bad_configuration(capsys):
    assert main(["solve", "--degree", "9"]) == EXIT_BAD_CONFIG
    assert main(["solve", "--levels", "4..2"]) == EXIT_BAD_CONFIG
    assert main(["solve", "--problem", "nope"]) == EXIT_BAD_CONFIG
    assert main(["solve", "--format", "csv", "--config", "/nonexistent"]) == EXIT_BAD_CONFIG
    capsys.readouterr()


def test_cli_solver_failure_exit_code(capsys, monkeypatch):
    _force_nonconvergence(monkeypatch)
    rc = main(["solve", "--degree", "1", "--levels", "3..3"])
    assert rc == EXIT_SOLVER_FAILURE
    assert "level 3" in capsys.readouterr().err


def test_cli_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "study.cfg"
    cfg.write_text("degree = 2\nlevels = 2..3\nproblem = sinsin\n"
                   "deterministic = true\n# comment\n")
    out1 = tmp_path / "from_file.csv"
    rc = main(["solve", "--config", str(cfg), "--out", str(out1)])
    assert rc == EXIT_OK
    # Flag overrides the file value.
    out2 = tmp_path / "override.csv"
    rc = main(["solve", "--config", str(cfg), "--levels", "2..2", "--out", str(out2)])
    assert rc == EXIT_OK
    assert len(out1.read_text().strip().split("\n")) == 3
    assert len(out2.read_text().strip().split("\n")) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert main(["solve", "--config", str(bad)]) == EXIT_BAD_CONFIG


def test_cli_problems_command(capsys):
    assert main(["problems"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "sinsin" in out and "polyk" in out


def test_invariant_suite_passes(capsys):
    import io
    buf = io.StringIO()
    assert run_invariant_suite(level=2, seed=7, out=buf) is True
    lines = buf.getvalue().strip().split("\n")
    assert len(lines) == 6
    assert all(ln.startswith("PASS") for ln in lines)
