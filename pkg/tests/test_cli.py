import numpy as np
import pytest

from hszego import FormField, GridSpec, MultiIndex, ScalarField
from hszego.cli import main
from hszego.fieldio import read_form, write_form

BASE_CONFIG = """
lambdas = 1.0
epsilon = 0.5
seed = 11
grid.spatial_radius = 4.0
grid.spatial_points = 25
grid.vertical_radius = 16.0
grid.vertical_points = 64
packet.1.alpha = 0
packet.1.t_low = 0.9
packet.1.t_high = 3.0
packet.1.order = 4
kernel_table.count = 2
kernel_table.diag_eps = 0.5,1.0
"""


@pytest.fixture
def config_path(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(BASE_CONFIG)
    return str(p)


def test_malformed_config_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("this is not a key value line")
    assert main(["verify", "--config", str(p)]) == 2
    assert "error" in capsys.readouterr().err


def test_kernel_table(config_path, tmp_path, capsys):
    out = tmp_path / "table.csv"
    assert main(["kernel-table", "--config", config_path, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[-2:] == ["route", "abs_disagreement"]
    # 2 random pairs + 2 diagonal eps values, two routes each
    assert len(lines) == 1 + 2 * (2 + 2)
    gap_col = header.index("abs_disagreement")
    for row in lines[1:]:
        assert float(row.split(",")[gap_col]) < 1e-6
    routes = {row.split(",")[header.index("route")] for row in lines[1:]}
    assert routes == {"closed-form", "fio-quadrature"}
    # diagonal rows scale like eps^-(n+1): |K| * eps^2 constant for n = 1
    eps_col = header.index("epsilon")
    abs_col = header.index("abs_k")
    diag = [row.split(",") for row in lines[1:]]
    scaled = {
        round(float(r[abs_col]) * float(r[eps_col]) ** 2, 12)
        for r in diag[-4:]  # the two diagonal eps values, two routes each
    }
    assert len(scaled) == 1


def test_kernel_table_empty_is_header_only(tmp_path):
    p = tmp_path / "empty.cfg"
    p.write_text(BASE_CONFIG.replace("kernel_table.count = 2", "kernel_table.count = 0")
                 .replace("kernel_table.diag_eps = 0.5,1.0", "kernel_table.diag_eps ="))
    out = tmp_path / "table.csv"
    assert main(["kernel-table", "--config", str(p), "--out", str(out)]) == 0
    assert len(out.read_text().strip().splitlines()) == 1


def test_make_packet_then_project(config_path, tmp_path, capsys):
    field_path = tmp_path / "packet.field"
    assert main(["make-packet", "--config", config_path, "--out", str(field_path)]) == 0
    out_path = tmp_path / "projected.field"
    code = main(
        ["project", "--config", config_path, "--in", str(field_path), "--out", str(out_path)]
    )
    assert code == 0
    report = capsys.readouterr().out
    assert "rel_change=" in report and "idempotency_gap" in report
    rel = float(report.split("rel_change=")[1].split()[0])
    assert rel < 1e-3
    projected = read_form(str(out_path))
    assert set(projected.components) == {MultiIndex(())}


def test_project_vanishing_degree_reports_zero(tmp_path, capsys):
    cfg = tmp_path / "two.cfg"
    cfg.write_text("lambdas = 1.0, 1.0\n")
    grid = GridSpec.make(3.5, 9, 8.0, 16)
    rng = np.random.default_rng(0)
    shape = grid.field_shape(2)
    comp = ScalarField(grid=grid, values=rng.normal(size=shape) + 1j * rng.normal(size=shape))
    form = FormField(grid=grid, q=1, components={MultiIndex((1,)): comp})
    fpath = tmp_path / "q1.field"
    write_form(fpath, form)
    assert main(["project", "--config", str(cfg), "--in", str(fpath)]) == 0
    out = capsys.readouterr().out
    assert "structural zero" in out
    assert "norm_out=0.000000e+00" in out


def test_project_budget_violation_exits_3(config_path, tmp_path, capsys):
    low_cfg = tmp_path / "low.cfg"
    low_cfg.write_text(
        BASE_CONFIG.replace("packet.1.t_low = 0.9", "packet.1.t_low = 0.25").replace(
            "packet.1.t_high = 3.0", "packet.1.t_high = 0.55"
        )
    )
    field_path = tmp_path / "low.field"
    assert main(["make-packet", "--config", str(low_cfg), "--out", str(field_path)]) == 0
    code = main(["project", "--config", str(low_cfg), "--in", str(field_path)])
    assert code == 3
    err = capsys.readouterr().err
    assert "gaussian-truncation" in err


def test_verify_subset_and_determinism(config_path, tmp_path, capsys):
    out1 = tmp_path / "r1.txt"
    out2 = tmp_path / "r2.txt"
    assert main(
        ["verify", "--config", config_path, "--criteria", "C01,C03", "--out", str(out1)]
    ) == 0
    assert main(
        ["verify", "--config", config_path, "--criteria", "C01,C03", "--out", str(out2),
         "--jobs", "2"]
    ) == 0
    assert out1.read_bytes() == out2.read_bytes()
    text = out1.read_text()
    assert "C01.gamma" in text and "PASS" in text


def test_verify_budget_violation_fails(tmp_path, capsys):
    cfg = tmp_path / "bad_budget.cfg"
    cfg.write_text(BASE_CONFIG.replace("grid.spatial_radius = 4.0", "grid.spatial_radius = 1.5"))
    code = main(["verify", "--config", str(cfg), "--criteria", "C00"])
    assert code == 1
    out = capsys.readouterr().out
    assert "FAIL" in out
    assert "gaussian-truncation" in out


def test_verify_unknown_criteria_exits_2(config_path, capsys):
    assert main(["verify", "--config", config_path, "--criteria", "C99"]) == 2
