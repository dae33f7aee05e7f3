"""Command-line interface tests driven through main(argv)."""

import numpy as np
import pytest

from frictionobs import ESTIMATES_HEADER, MEASURED_HEADER, SIM_HEADER, read_columns
from frictionobs.cli import (
    EXIT_CONFIG,
    EXIT_DESIGN,
    EXIT_DIVERGED,
    EXIT_OK,
    EXIT_SCHEMA,
    main,
)

SHORT_CFG = """\
plant.m = 0.052
friction.c_f = 0.2143
friction.sigma = 2.0
friction.beta = 0.002
friction.s_scale = 2000
sim.dt = 5e-4
sim.t_end = 0.4
sim.noise_std = 1e-6
sim.seed = 3
scenario.pulses = 0.05,0.01,1.6
observer.poles = -350, -10
"""


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(SHORT_CFG, encoding="utf-8")
    return p


def test_simulate_writes_both_files(cfg_file, tmp_path, capsys):
    out = tmp_path / "sim.csv"
    rc = main(["simulate", "--config", str(cfg_file), "--out", str(out)])
    assert rc == EXIT_OK
    assert "wrote" in capsys.readouterr().out
    t, x, v, f, u = read_columns(out, SIM_HEADER)
    assert len(t) == 801
    tm, xm, um = read_columns(tmp_path / "sim_measured.csv", MEASURED_HEADER)
    assert np.array_equal(tm, t) and np.array_equal(um, u)
    assert not np.array_equal(xm, x)  # noise applied to the measured copy


def test_simulate_missing_config(tmp_path):
    rc = main(["simulate", "--config", str(tmp_path / "no.cfg"), "--out", str(tmp_path / "s.csv")])
    assert rc == EXIT_CONFIG


def test_simulate_diverged(tmp_path):
    p = tmp_path / "d.cfg"
    p.write_text("sim.v_max = 0.05\nsim.t_end = 0.2\nscenario.pulses = 0.0,0.2,5.0\n",
                 encoding="utf-8")
    rc = main(["simulate", "--config", str(p), "--out", str(tmp_path / "s.csv")])
    assert rc == EXIT_DIVERGED


def test_simulate_multi_run_seeds(cfg_file, tmp_path, capsys):
    out = tmp_path / "batch.csv"
    rc = main(["simulate", "--config", str(cfg_file), "--out", str(out), "--runs", "2"])
    assert rc == EXIT_OK
    txt = capsys.readouterr().out
    assert "seed 3" in txt and "seed 4" in txt
    x0 = read_columns(tmp_path / "batch_measured_run000.csv", MEASURED_HEADER)[1]
    x1 = read_columns(tmp_path / "batch_measured_run001.csv", MEASURED_HEADER)[1]
    assert not np.array_equal(x0, x1)  # different seeds, different noise
    s0 = read_columns(tmp_path / "batch_run000.csv", SIM_HEADER)[1]
    s1 = read_columns(tmp_path / "batch_run001.csv", SIM_HEADER)[1]
    assert np.array_equal(s0, s1)  # truth does not depend on the seed


def test_design_pass_and_fail(capsys):
    rc = main(["design", "--poles", "-350,-10", "--m", "0.052"])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "l1 = 360.0" in out and "l2 = -182.0" in out and "cond_b = true" in out
    rc = main(["design", "--poles", "-350,-10", "--m", "0.052", "--kappa", "2000"])
    assert rc == EXIT_DESIGN
    assert "cond_b = false" in capsys.readouterr().out


def test_design_bad_poles():
    assert main(["design", "--poles", "-350"]) == EXIT_CONFIG
    assert main(["design", "--poles", "-350,ten"]) == EXIT_CONFIG
    assert main(["design", "--poles", "-350,10"]) == EXIT_CONFIG


def test_observe_roundtrip(cfg_file, tmp_path, capsys):
    sim = tmp_path / "sim.csv"
    est = tmp_path / "est.csv"
    main(["simulate", "--config", str(cfg_file), "--out", str(sim)])
    capsys.readouterr()
    rc = main(["observe", "--config", str(cfg_file),
               "--measured", str(tmp_path / "sim_measured.csv"),
               "--out", str(est), "--truth", str(sim)])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "rms_e_obs = " in out
    assert "rms_velocity_error = " in out
    assert "rms_e_model = " in out
    cols = read_columns(est, ESTIMATES_HEADER)
    assert len(cols[0]) == 801


def test_observe_schema_errors(cfg_file, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
    rc = main(["observe", "--config", str(cfg_file), "--measured", str(bad),
               "--out", str(tmp_path / "e.csv")])
    assert rc == EXIT_SCHEMA


def test_observe_nonuniform_grid(cfg_file, tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("t,x,u\n0.0,0.0,0.0\n0.0005,0.0,0.0\n0.002,0.0,0.0\n", encoding="utf-8")
    rc = main(["observe", "--config", str(cfg_file), "--measured", str(p),
               "--out", str(tmp_path / "e.csv")])
    assert rc == EXIT_SCHEMA


def test_observe_truth_grid_mismatch(cfg_file, tmp_path, capsys):
    sim = tmp_path / "sim.csv"
    main(["simulate", "--config", str(cfg_file), "--out", str(sim)])
    capsys.readouterr()
    t, x, v, f, u = read_columns(sim, SIM_HEADER)
    from frictionobs import write_columns

    short = tmp_path / "short.csv"
    write_columns(short, SIM_HEADER, [t[:-5], x[:-5], v[:-5], f[:-5], u[:-5]])
    rc = main(["observe", "--config", str(cfg_file),
               "--measured", str(tmp_path / "sim_measured.csv"),
               "--out", str(tmp_path / "e.csv"), "--truth", str(short)])
    assert rc == EXIT_SCHEMA


def test_observe_empty_measured(cfg_file, tmp_path, capsys):
    p = tmp_path / "m.csv"
    p.write_text("t,x,u\n", encoding="utf-8")
    rc = main(["observe", "--config", str(cfg_file), "--measured", str(p),
               "--out", str(tmp_path / "e.csv")])
    assert rc == EXIT_OK
    assert "no samples" in capsys.readouterr().out
    assert (tmp_path / "e.csv").read_text(encoding="utf-8").strip() == ",".join(ESTIMATES_HEADER)


def test_identify_runs_and_reports(tmp_path, capsys):
    # noise-free short record, fitter started at the generating values
    cfg = tmp_path / "i.cfg"
    cfg.write_text(
        "sim.dt = 1e-3\nsim.t_end = 0.08\nsim.noise_std = 0\n"
        "scenario.pulses = 0.01,0.005,1.0\n",
        encoding="utf-8",
    )
    sim = tmp_path / "sim.csv"
    main(["simulate", "--config", str(cfg), "--out", str(sim)])
    capsys.readouterr()
    report = tmp_path / "fit.txt"
    rc = main(["identify", "--config", str(cfg),
               "--measured", str(tmp_path / "sim_measured.csv"), "--out", str(report)])
    assert rc == EXIT_OK
    txt = report.read_text(encoding="utf-8")
    for key in ("sigma = ", "beta = ", "s_scale = ", "amplitude = ", "width = ",
                "rms_residual = ", "iterations = ", "converged = ", "beta_insensitive = "):
        assert key in txt
    # started at the truth, the fit must stay in its basin
    vals = dict(line.split(" = ") for line in txt.strip().splitlines())
    assert abs(float(vals["sigma"]) - 2.0) / 2.0 < 0.10
    assert float(vals["rms_residual"]) < 1e-6


def test_identify_needs_impulse_start(tmp_path):
    cfg = tmp_path / "i.cfg"
    cfg.write_text("scenario.pulses =\nsim.t_end = 0.05\nsim.dt = 1e-3\n", encoding="utf-8")
    m = tmp_path / "m.csv"
    m.write_text("t,x,u\n0.0,0.0,0.0\n0.001,0.0,0.0\n", encoding="utf-8")
    rc = main(["identify", "--config", str(cfg), "--measured", str(m),
               "--out", str(tmp_path / "r.txt")])
    assert rc == EXIT_CONFIG


def test_identify_bad_bounds_factor(tmp_path, cfg_file):
    m = tmp_path / "m.csv"
    m.write_text("t,x,u\n0.0,0.0,0.0\n0.001,0.0,0.0\n", encoding="utf-8")
    rc = main(["identify", "--config", str(cfg_file), "--measured", str(m),
               "--out", str(tmp_path / "r.txt"), "--bounds-factor", "0.5"])
    assert rc == EXIT_CONFIG


def test_identify_nonuniform_grid_rejected(cfg_file, tmp_path):
    m = tmp_path / "m.csv"
    m.write_text("t,x,u\n0.0,0.0,0.0\n0.001,0.0,0.0\n0.003,0.0,0.0\n", encoding="utf-8")
    rc = main(["identify", "--config", str(cfg_file), "--measured", str(m),
               "--out", str(tmp_path / "r.txt")])
    assert rc == EXIT_SCHEMA


def test_compare_merges(cfg_file, tmp_path, capsys):
    sim = tmp_path / "sim.csv"
    est = tmp_path / "est.csv"
    merged = tmp_path / "merged.csv"
    script = tmp_path / "plot.py"
    main(["simulate", "--config", str(cfg_file), "--out", str(sim)])
    main(["observe", "--config", str(cfg_file),
          "--measured", str(tmp_path / "sim_measured.csv"), "--out", str(est)])
    capsys.readouterr()
    rc = main(["compare", "--sim", str(sim), "--estimates", str(est),
               "--out", str(merged), "--plot-script", str(script)])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "rows = 801" in out and "rms_velocity_error = " in out
    header = ("t", "x", "v", "f", "u", "w2_tilde", "w3_tilde", "phi", "e_obs")
    cols = read_columns(merged, header)
    assert len(cols) == 9 and len(cols[0]) == 801
    assert "matplotlib" in script.read_text(encoding="utf-8")


def test_compare_length_mismatch(cfg_file, tmp_path, capsys):
    sim = tmp_path / "sim.csv"
    est = tmp_path / "est.csv"
    main(["simulate", "--config", str(cfg_file), "--out", str(sim)])
    main(["observe", "--config", str(cfg_file),
          "--measured", str(tmp_path / "sim_measured.csv"), "--out", str(est)])
    capsys.readouterr()
    from frictionobs import write_columns

    cols = read_columns(est, ESTIMATES_HEADER)
    write_columns(est, ESTIMATES_HEADER, [c[:-1] for c in cols])
    rc = main(["compare", "--sim", str(sim), "--estimates", str(est),
               "--out", str(tmp_path / "m.csv")])
    assert rc == EXIT_SCHEMA


def test_unknown_subcommand_maps_to_config_error():
    assert main(["frobnicate"]) == EXIT_CONFIG
    assert main([]) == EXIT_CONFIG
