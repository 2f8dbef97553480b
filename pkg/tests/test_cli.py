import csv
import dataclasses
import math
import subprocess
import sys

import pytest

from anscy.cli import PRESETS, dump_config, load_config, parse_overrides, run_experiment, save_config
from anscy.cli import main as cli_main
from anscy.cli.runner import with_overrides
from anscy.core import ConfigError, SystemConfig

# caption parameter table: preset -> expected base values (dBm, metres, per m^2)
CAPTIONS = {
    "fig2-co-validate": dict(lambda_b=1e-4, r_c=200.0, lambda_u=1e-3, p_tau_dbm=20.0, alpha=3.0,
                             p_tot_dbm=30.0, phi=0.5, n0_dbm=-50.0),
    "fig3-co-vs-lambdaB": dict(r_c=200.0, n_t=3, tau=3, p_tau_dbm=20.0, alpha=3.0, p_tot_dbm=30.0,
                               phi=0.5, n0_dbm=-70.0),
    "fig4-so-validate": dict(lambda_b=1 / (16 * 200 ** 2), r_c=300.0, lambda_u=10 / (16 * 200 ** 2),
                             lambda_e=2 / (16 * 200 ** 2), n_t=4, tau=4, p_tau_dbm=20.0, alpha=3.0,
                             p_tot_dbm=30.0, n0_dbm=-50.0),
    "fig5-so-vs-lambdaB": dict(r_c=300.0, lambda_e=1 / (16 * 300 ** 2), p_tau_dbm=20.0, alpha=3.0,
                               p_tot_dbm=30.0, phi=0.5, n0_dbm=-50.0),
    "fig6-mu-vs-phi": dict(r_c=300.0, p_tau_dbm=30.0, n_t=4, tau=4, n0_dbm=-50.0, p_tot_dbm=30.0),
    "fig7-mu-vs-ptau": dict(r_c=300.0, phi=0.5, alpha=3.0, n_t=4, tau=4, n0_dbm=-50.0),
    "fig8-mu-vs-nt": dict(r_c=300.0, p_tau_dbm=30.0, n0_dbm=-50.0, p_tot_dbm=30.0, phi=0.3),
    "fig9-edge-user": dict(r_c=100.0, alpha=3.0, n_t=3, tau=3, p_tau_dbm=30.0, n0_dbm=-50.0, phi=0.3),
}


@pytest.mark.parametrize("name", sorted(CAPTIONS))
def test_presets_match_caption_table(name):
    base = PRESETS[name].base
    for key, value in CAPTIONS[name].items():
        assert getattr(base, key) == pytest.approx(value, rel=1e-12), key


def test_preset_ties_hold_at_every_point():
    spec = PRESETS["fig6-mu-vs-phi"]
    for lam in spec.series:
        cfg = spec.point_config(0.5, lam)
        assert cfg.lambda_u == pytest.approx(10 * lam)
        assert cfg.lambda_e == pytest.approx(lam / 10)
    cfg = PRESETS["fig8-mu-vs-nt"].point_config(6, spec.series[0])
    assert cfg.n_t == cfg.tau == 6


def test_fig7_powers_split_evenly():
    cfg = PRESETS["fig7-mu-vs-ptau"].base
    assert 10 * math.log10(cfg.p_s) == pytest.approx(15.0)
    assert 10 * math.log10(cfg.p_a) == pytest.approx(15.0)


def test_edge_user_distance():
    spec = PRESETS["fig9-edge-user"]
    assert spec.user_distance(spec.base) == pytest.approx(100.0 * (1 - 1e-3))


def test_all_presets_have_sorted_nonempty_grids():
    for spec in PRESETS.values():
        assert spec.grid and list(spec.grid) == sorted(spec.grid)


def test_minimal_config_fills_defaults(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# only the antenna count\nn_t=6\n")
    cfg = load_config(p)
    assert cfg == SystemConfig(n_t=6)


def test_alpha_rejected(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("n_t=4\nalpha=1.5\n")
    with pytest.raises(ConfigError, match="alpha must exceed 2") as exc:
        load_config(p)
    assert ":2:" in str(exc.value)


@pytest.mark.parametrize("text,needle", [
    ("n_t=4\nbogus=3\n", ":2: unknown key 'bogus'"),
    ("n_t=four\n", ":1: n_t: expected an integer"),
    ("r_c\n", ":1: expected key=value"),
    ("n_t=4\nn_t=5\n", ":2: duplicate key 'n_t'"),
    ("campbell_mode=Sideways\n", ":1: campbell_mode"),
])
def test_parse_errors_name_key_and_line(text, needle):
    with pytest.raises(ConfigError) as exc:
        parse_overrides(text, "f.cfg")
    assert needle in str(exc.value)


def test_preset_round_trip(tmp_path):
    cfg = PRESETS["fig2-co-validate"].base
    p = tmp_path / "fig2.cfg"
    save_config(cfg, p)
    again = load_config(p)
    assert again == cfg
    assert dump_config(again) == p.read_text()


def test_optional_fields_round_trip(tmp_path):
    cfg = SystemConfig(r_sim=5000.0, campbell_mode="Planar2D")
    p = tmp_path / "c.cfg"
    save_config(cfg, p)
    assert load_config(p) == cfg


def _small(spec, tmp_path, name, **kw):
    return dataclasses.replace(spec, out_path=str(tmp_path / name), trials=2048, seed=11, **kw)


def test_fig2_columns_and_determinism(tmp_path):
    spec = PRESETS["fig2-co-validate"]
    a = run_experiment(_small(spec, tmp_path, "a.csv", grid=spec.grid[::5]))
    b = run_experiment(_small(spec, tmp_path, "b.csv", grid=spec.grid[::5]))
    assert a.csv_path.read_bytes() == b.csv_path.read_bytes()
    with a.csv_path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert {"beta_bs_db", "p_co_analytic", "p_co_lower", "p_co_mc", "ci"} <= set(rows[0])
    assert len(rows) == len(spec.grid[::5])
    assert (tmp_path / "a.gp").read_text().count("a.csv") >= 1
    assert (tmp_path / "a.csv.timing.json").exists()


def test_fig4_columns(tmp_path):
    spec = PRESETS["fig4-so-validate"]
    res = run_experiment(_small(spec, tmp_path, "so.csv", grid=(0.0,)))
    assert res.columns[:6] == ["beta_e_db", "beta_e", "p_so_upper", "p_so_lower", "p_so_mc", "ci"]
    up, lo, mc_p = res.rows[0][2], res.rows[0][3], res.rows[0][4]
    assert lo <= up and 0 <= mc_p <= 1


def test_seventeen_significant_digits(tmp_path):
    spec = PRESETS["fig2-co-validate"]
    res = run_experiment(_small(spec, tmp_path, "d.csv", grid=(5.0,)), mc_enabled=False)
    line = res.csv_path.read_text().splitlines()[1].split(",")
    assert float(line[3]) == res.rows[0][3]
    assert line[5] == "nan"


def test_infeasible_points_are_kept(tmp_path):
    spec = PRESETS["fig7-mu-vs-ptau"]
    small = _small(spec, tmp_path, "f7.csv", grid=(0.0, 40.0), series=spec.series[-1:])
    res = run_experiment(small, mc_enabled=False)
    assert len(res.rows) == 2
    assert "feasible" in res.columns


def test_cli_exit_codes(tmp_path, monkeypatch, capsys):
    spec = PRESETS["fig7-mu-vs-ptau"]
    monkeypatch.setitem(PRESETS, "fig7-mu-vs-ptau",
                        dataclasses.replace(spec, grid=(0.0,), series=spec.series[-1:]))
    out = tmp_path / "x.csv"
    assert cli_main.main(["run", "fig7-mu-vs-ptau", "--no-mc", "--out", str(out)]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("alpha=1.5\n")
    assert cli_main.main(["run", "fig2-co-validate", "--config", str(bad), "--no-mc"]) == 1
    assert "alpha must exceed 2" in capsys.readouterr().err
    spec9 = PRESETS["fig9-edge-user"]
    monkeypatch.setitem(PRESETS, "fig9-edge-user",
                        dataclasses.replace(spec9, grid=(1e-7,), series=(30.0,)))
    assert cli_main.main(["run", "fig9-edge-user", "--no-mc", "--out", str(tmp_path / "e.csv")]) == 0


def test_config_override_drops_tie(tmp_path):
    spec = with_overrides(PRESETS["fig6-mu-vs-phi"], {"lambda_u": 1e-5})
    assert all(k != "lambda_u" for k, _ in spec.ties)
    assert spec.point_config(0.5, spec.series[0]).lambda_u == 1e-5


def test_presets_list_command(capsys):
    assert cli_main.main(["presets", "list"]) == 0
    out = capsys.readouterr().out
    for name in PRESETS:
        assert name in out


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "anscy.cli", "presets", "show", "fig2-co-validate"],
                          capture_output=True, text=True, check=True)
    assert "n_t=3" in proc.stdout
