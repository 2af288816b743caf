import json

import pytest

from afmi.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_equilibria_json(capsys):
    code, out, _ = run(capsys, "equilibria", "--xi", "2.2")
    assert code == 0
    doc = json.loads(out)
    assert doc["regime"] == "two_interior"
    kinds = [e["kind"] for e in doc["equilibria"]]
    assert kinds.count("interior_low") == 1
    assert kinds.count("interior_high") == 1


def test_case_6_report(capsys):
    code, out, _ = run(capsys, "case", "--id", "6")
    assert code == 0
    doc = json.loads(out)
    e2 = [e for e in doc["equilibria"] if e["kind"] == "interior_high"][0]
    assert e2["x"] == pytest.approx(5.26541, abs=1e-3)
    assert e2["y"] == pytest.approx(5.34353, abs=1e-3)
    assert e2["eigenvalues"][0]["re"] == pytest.approx(0.000645, abs=1e-4)


def test_bifurcate_saddle_node(capsys):
    code, out, _ = run(capsys, "bifurcate", "--kind", "saddle-node",
                       "--bracket", "2.3", "2.6")
    assert code == 0
    doc = json.loads(out)
    assert doc["xi_star"] == pytest.approx(2.4828, abs=1e-3)


def test_empty_config_rejected(tmp_path, capsys):
    cfg = tmp_path / "empty.toml"
    cfg.write_text("")
    code, _, err = run(capsys, "equilibria", "--config", str(cfg))
    assert code == 2
    assert "expected keys" in err


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("alpha = 0.1\nbogus = 3\n")
    code, _, err = run(capsys, "equilibria", "--config", str(cfg))
    assert code == 2
    assert "bogus" in err


def test_unknown_command_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_numerical_failure_exit_code(capsys):
    # no trace sign change on this bracket
    code, _, err = run(capsys, "bifurcate", "--kind", "hopf",
                       "--bracket", "2.25", "2.35")
    assert code == 3
    assert "failure" in err


def test_flag_beats_config_beats_default(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text("xi = 1.0\nalpha = 0.2\n")
    # config only
    _, out, _ = run(capsys, "equilibria", "--config", str(cfg))
    doc = json.loads(out)
    assert doc["params"]["xi"] == 1.0
    assert doc["params"]["alpha"] == 0.2
    assert doc["params"]["beta"] == 0.319  # built-in default
    # flag wins over config
    _, out, _ = run(capsys, "equilibria", "--config", str(cfg),
                    "--xi", "2.2")
    assert json.loads(out)["params"]["xi"] == 2.2


def test_simulate_csv(capsys):
    code, out, _ = run(capsys, "simulate", "--x0", "10", "--y0", "4",
                       "--xi", "2.2", "--t-max", "50")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t,x,y"
    assert len(lines) > 10
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and float(first[1]) == 10.0


def test_nullclines_csv(capsys):
    code, out, _ = run(capsys, "nullclines", "--xi", "2.2",
                       "--samples", "50")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "curve,x,y"
    curves = {line.split(",")[0] for line in lines[1:]}
    assert curves == {"prey", "predator"}


def test_manifold_csv(capsys):
    code, out, _ = run(capsys, "manifold", "--xi", "2.2",
                       "--branch", "unstable-plus", "--budget", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "branch,x,y"
    assert all(line.startswith("unstable_plus,") for line in lines[1:])


def test_basin_json(capsys):
    code, out, _ = run(capsys, "basin", "--xi", "2.2",
                       "--nx", "6", "--ny", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["grid"]["nx"] == 6
    assert 0.0 <= doc["fraction_prey_free"] <= 1.0


def test_sweep_csv_output(tmp_path, capsys):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--from", "1.0", "--to", "3.0",
                     "--steps", "40", "--output", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "xi,x1,y1,stab1,x2,y2,stab2,events"
    assert len(lines) == 41


def test_sweep_requires_range(capsys):
    code, _, err = run(capsys, "sweep")
    assert code == 2


def test_svg_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for path in (a, b):
        code, _, _ = run(capsys, "case", "--id", "3", "--format", "svg",
                         "--output", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith('<?xml version="1.0"')


def test_portrait_has_two_interior_glyphs(tmp_path, capsys):
    path = tmp_path / "c3.svg"
    run(capsys, "case", "--id", "3", "--format", "svg",
        "--output", str(path))
    svg = path.read_text()
    assert svg.count("<circle") + svg.count('<path class="equilibrium"') == 5
    # the two interior glyphs: one saddle cross + one focus circle
    assert svg.count('<path class="equilibrium"') == 2  # both saddles


def test_regime_map_has_three_boundaries(capsys):
    code, out, _ = run(capsys, "regime-map")
    assert code == 0
    for layer in ("boundary-b-zero", "boundary-c-zero",
                  "boundary-slope-equal"):
        assert layer in out


def test_config_xi_range_rejected_for_scalar_command(tmp_path, capsys):
    cfg = tmp_path / "range.toml"
    cfg.write_text('[xi]\nfrom = 1.0\nto = 2.0\nsteps = 10\n')
    code, _, err = run(capsys, "equilibria", "--config", str(cfg))
    assert code == 2
    assert "scalar" in err
