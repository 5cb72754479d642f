import subprocess
import sys

import numpy as np
import pytest

from hybrid_irs.channel import ScenarioConfig, build_channels, dump_scenario
from hybrid_irs.errors import ConfigError, NonConvergenceError
from hybrid_irs.harness import ExperimentSpec, load_states, read_csv, run
from hybrid_irs.harness import cli
from hybrid_irs.harness.experiments import layout_for
from hybrid_irs.irs_model import ReflectionState, rate

SMALL = ScenarioConfig(N=4, M=16, M_a=4, d_sr=30.0, d_sb=40.0, sigma_r2_dBm=-80.0)


@pytest.fixture
def small_scenario(tmp_path):
    path = tmp_path / "small.txt"
    dump_scenario(SMALL, path)
    return path


def sim(*argv):
    return cli.main([str(a) for a in argv])


class TestCli:
    def test_convergence_rows(self, tmp_path, small_scenario):
        assert sim("convergence", "--scenario", small_scenario, "--out", tmp_path / "o", "--powers", "20", "25") == 0
        meta, rows = read_csv(tmp_path / "o" / "convergence.csv")
        assert meta["kind"] == "convergence" and meta["seed"] == "0"
        assert meta["scenario_sha256"] == SMALL.digest()
        assert {r["algorithm"] for r in rows} == {"fp", "ear"}
        assert list(rows[0]) == ["algorithm", "P_dBm", "iteration", "rate"]
        for a in ("fp", "ear"):
            for P in ("20.0", "25.0"):
                r = [float(x["rate"]) for x in rows if x["algorithm"] == a and x["P_dBm"] == P]
                assert r and np.all(np.diff(r) >= -1e-6)

    def test_single_iteration(self, tmp_path, small_scenario):
        sim("convergence", "--scenario", small_scenario, "--out", tmp_path, "--powers", "25", "--max-outer", "1")
        _, rows = read_csv(tmp_path / "convergence.csv")
        assert sorted(r["algorithm"] for r in rows) == ["ear", "fp"]

    @pytest.mark.parametrize("kind, extra", [
        ("convergence", ["--powers", "20,25"]),
        ("rate_vs_m", ["--sweep", "8,16,24"]),
        ("complexity_vs_m", ["--sweep", "8", "16"]),
        ("single_run", []),
    ])
    def test_byte_identical_reruns(self, tmp_path, small_scenario, kind, extra):
        outs = []
        for name in ("a", "b"):
            assert sim(kind, "--scenario", small_scenario, "--out", tmp_path / name, "--seed", 3, *extra) == 0
            outs.append(sorted((tmp_path / name).iterdir()))
        assert [p.name for p in outs[0]] == [p.name for p in outs[1]]
        for a, b in zip(*outs):
            assert a.read_bytes() == b.read_bytes()

    def test_workers_do_not_change_output(self, tmp_path, small_scenario):
        for name, w in (("serial", 1), ("pool", 2)):
            sim("rate_vs_m", "--scenario", small_scenario, "--out", tmp_path / name, "--sweep", "8,16",
                "--workers", w)
        for f in ("rate_vs_m.csv", "states.csv"):
            assert (tmp_path / "serial" / f).read_bytes() == (tmp_path / "pool" / f).read_bytes()

    def test_stored_states_reproduce_rates(self, tmp_path, small_scenario):
        sim("rate_vs_m", "--scenario", small_scenario, "--out", tmp_path, "--sweep", "8,16")
        _, rows = read_csv(tmp_path / "rate_vs_m.csv")
        assert len(rows) == 12
        for r in rows:
            M = int(r["M"])
            cfg = SMALL.replace(M=M, M_a=M // 2)
            lay = layout_for(r["algorithm"], M, M // 2, cfg.beta_max)
            v, theta = load_states(tmp_path / "states.csv", r["algorithm"], M)
            got = rate(build_channels(cfg, lay), cfg, v, ReflectionState(theta, lay))
            assert abs(got - float(r["rate"])) <= 1e-9

    def test_complexity_fixed_iterations(self, tmp_path, small_scenario):
        sim("complexity_vs_m", "--scenario", small_scenario, "--out", tmp_path, "--sweep", "8,16",
            "--iterations", 2)
        _, rows = read_csv(tmp_path / "complexity_vs_m.csv")
        assert [(r["L"], r["K"]) for r in rows] == [("2", "2"), ("2", "2")]

    def test_trace_and_svg(self, tmp_path, small_scenario):
        pytest.importorskip("matplotlib")
        assert sim("convergence", "--scenario", small_scenario, "--out", tmp_path, "--powers", "25",
                   "--trace", "--svg") == 0
        _, rows = read_csv(tmp_path / "trace.csv")
        assert {r["step"] for r in rows} == {"v", "psi"}
        svg = list(tmp_path.glob("*.svg"))
        assert svg and svg[0].read_text().startswith("<?xml")

    def test_default_scenario_is_builtin(self, tmp_path):
        assert sim("complexity_vs_m", "--out", tmp_path, "--iterations", 1, "--sweep", "8") == 0
        meta, _ = read_csv(tmp_path / "complexity_vs_m.csv")
        assert meta["scenario_sha256"] == ScenarioConfig().digest()

    @pytest.mark.parametrize("argv", [
        ["rate_vs_m", "--sweep", "6,7"],
        ["rate_vs_m", "--algos", "fp,magic"],
        ["single_run", "--scenario", "__missing__.txt"],
    ])
    def test_config_errors_exit_2(self, tmp_path, argv, capsys):
        assert sim(*argv, "--out", tmp_path) == 2
        assert "invalid configuration" in capsys.readouterr().err

    def test_bad_scenario_file_exit_2(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("N = 4\nwhat = 1\n")
        assert sim("single_run", "--scenario", bad, "--out", tmp_path) == 2

    def test_non_convergence_exit_3(self, tmp_path, monkeypatch):
        def boom(spec):
            raise NonConvergenceError("stalled", partial=[1.0])
        monkeypatch.setattr(cli, "run", boom)
        assert sim("single_run", "--out", tmp_path) == 3

    def test_io_error_exit_1(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert sim("complexity_vs_m", "--out", blocker / "sub", "--iterations", 1, "--sweep", "8") == 1

    def test_module_entry_point(self, tmp_path):
        out = subprocess.run([sys.executable, "-m", "hybrid_irs", "complexity_vs_m", "--out", str(tmp_path),
                              "--iterations", "1", "--sweep", "8"], capture_output=True, text=True)
        assert out.returncode == 0 and "complexity_vs_m.csv" in out.stdout


class TestExperimentSpec:
    @pytest.mark.parametrize("kw", [
        dict(kind="bogus"),
        dict(kind="rate_vs_m", sweep=()),
        dict(kind="convergence", powers=()),
        dict(kind="single_run", algorithms=()),
        dict(kind="single_run", workers=0),
        dict(kind="rate_vs_m", active_fraction=0.75),
    ])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            ExperimentSpec(scenario=SMALL, **kw)

    def test_odd_sizes_allowed_for_baselines_only(self):
        ExperimentSpec(kind="rate_vs_m", scenario=SMALL, sweep=(5, 7), algorithms=("passive", "none"))

    def test_run_returns_paths(self, tmp_path):
        spec = ExperimentSpec(kind="single_run", scenario=SMALL, algorithms=("fp", "none"), output_dir=tmp_path)
        written = run(spec)
        assert set(written) == {"single_run", "states"}
        _, rows = read_csv(written["single_run"])
        assert [r["algorithm"] for r in rows] == ["fp", "none"]
