"""Tests for the command-line client: CSV outputs, config handling, exit codes."""

from matheron_enkf.cli import (EXIT_BAD_ARGS, EXIT_CHECK_FAILED,
                               EXIT_NUMERICAL, EXIT_OK, POSTERIOR_HEADER,
                               SEED_ENV_VAR, TIMING_HEADER, fmt_float, main,
                               parse_config)

DEMO_ARGS = ["demo", "--d", "40", "--m", "8", "--n-ens", "6", "--runs", "3",
             "--n-draws", "2", "--seed", "7"]

SWEEP_ARGS = ["sweep-obs", "--d", "40", "--n-ens", "6", "--runs", "3",
              "--methods", "gp", "--n-draws", "0", "--seed", "3",
              "--values", "4,8"]


def run_demo(tmp_path, name, extra=(), args=None):
    out = tmp_path / name
    code = main((args or DEMO_ARGS) + list(extra) + ["--out-dir", str(out)])
    return code, out / "posterior_samples.csv"


class TestFmtFloat:
    def test_shortest_round_trip(self):
        assert fmt_float(0.1) == "0.1"
        assert fmt_float(1.0) == "1.0"
        assert fmt_float(1 / 3) == repr(1 / 3)

    def test_round_trips_exactly(self):
        for x in (0.1, 1 / 3, 2.5e-17, 123456.789):
            assert float(fmt_float(x)) == x


class TestDemoCsv:
    def test_row_contract(self, tmp_path):
        code, csv_path = run_demo(tmp_path, "a")
        assert code == EXIT_OK
        lines = csv_path.read_text().splitlines()
        assert lines[0] == POSTERIOR_HEADER
        # one summary row plus n_draws draw rows per method and grid point
        assert len(lines) == 1 + 40 * 3 * (1 + 2)
        rows = [line.split(",") for line in lines[1:]]
        assert {r[0] for r in rows} == {"gp", "enkf", "letkf"}
        assert all(len(r) == 10 for r in rows)

    def test_observed_flags_and_values(self, tmp_path):
        _, csv_path = run_demo(tmp_path, "a")
        rows = [line.split(",") for line in
                csv_path.read_text().splitlines()[1:]]
        observed = [r for r in rows if r[4] == "1"]
        hidden = [r for r in rows if r[4] == "0"]
        # 8 sites, 3 methods, 3 rows per point
        assert len(observed) == 8 * 3 * 3
        assert all(r[5] != "" for r in observed)
        assert all(r[5] == "" for r in hidden)

    def test_summary_and_draw_rows(self, tmp_path):
        _, csv_path = run_demo(tmp_path, "a")
        rows = [line.split(",") for line in
                csv_path.read_text().splitlines()[1:]]
        summary = [r for r in rows if r[8] == "-1"]
        draw = [r for r in rows if r[8] != "-1"]
        assert len(summary) == 40 * 3
        assert all(r[9] == "" for r in summary)
        assert {r[8] for r in draw} == {"0", "1"}
        assert all(float(r[9]) == float(r[9]) for r in draw)

    def test_reruns_are_byte_identical(self, tmp_path):
        _, a = run_demo(tmp_path, "a")
        _, b = run_demo(tmp_path, "b")
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_output(self, tmp_path):
        _, a = run_demo(tmp_path, "a")
        args = [x if x != "7" else "8" for x in DEMO_ARGS]
        _, b = run_demo(tmp_path, "b", args=args)
        assert a.read_bytes() != b.read_bytes()


class TestSeedResolution:
    def test_env_var_fallback(self, tmp_path, monkeypatch):
        _, flagged = run_demo(tmp_path, "a")
        monkeypatch.setenv(SEED_ENV_VAR, "7")
        args = [x for x in DEMO_ARGS if x not in ("--seed", "7")]
        _, from_env = run_demo(tmp_path, "b", args=args)
        assert flagged.read_bytes() == from_env.read_bytes()

    def test_flag_beats_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "99")
        _, a = run_demo(tmp_path, "a")
        monkeypatch.delenv(SEED_ENV_VAR)
        _, b = run_demo(tmp_path, "b")
        assert a.read_bytes() == b.read_bytes()

    def test_bad_env_var_rejected(self, tmp_path, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "not-a-seed")
        args = [x for x in DEMO_ARGS if x not in ("--seed", "7")]
        code, _ = run_demo(tmp_path, "a", args=args)
        assert code == EXIT_BAD_ARGS


class TestConfigFile:
    def test_config_matches_flags(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# demo settings\n"
            "d = 40\n"
            "m = 8\n"
            "n_ens = 6\n"
            "runs = 3\n"
            "n_draws = 2  # per method\n"
            "seed = 7\n")
        _, flagged = run_demo(tmp_path, "a")
        code, from_cfg = run_demo(tmp_path, "b", args=["demo"],
                                  extra=["--config", str(cfg)])
        assert code == EXIT_OK
        assert flagged.read_bytes() == from_cfg.read_bytes()

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("d = 30\nm = 8\nn_ens = 6\nruns = 3\n"
                       "n_draws = 2\nseed = 7\n")
        _, flagged = run_demo(tmp_path, "a")
        _, mixed = run_demo(tmp_path, "b", args=["demo", "--d", "40"],
                            extra=["--config", str(cfg)])
        assert flagged.read_bytes() == mixed.read_bytes()

    def test_parse_config_types(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("d=20\ntau=0.5\nperturb_obs=yes\nmethods=gp, letkf\n")
        values = parse_config(str(cfg))
        assert values == {"d": 20, "tau": 0.5, "perturb_obs": True,
                          "methods": "gp, letkf"}

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("dd = 40\n")
        code, _ = run_demo(tmp_path, "a", extra=["--config", str(cfg)])
        assert code == EXIT_BAD_ARGS

    def test_bad_value_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("d = forty\n")
        code, _ = run_demo(tmp_path, "a", extra=["--config", str(cfg)])
        assert code == EXIT_BAD_ARGS

    def test_missing_file_rejected(self, tmp_path):
        code, _ = run_demo(tmp_path, "a",
                           extra=["--config", str(tmp_path / "absent.cfg")])
        assert code == EXIT_BAD_ARGS


class TestSweepCsv:
    def test_obs_sweep_rows(self, tmp_path):
        out = tmp_path / "a"
        code = main(SWEEP_ARGS + ["--out-dir", str(out)])
        assert code == EXIT_OK
        lines = (out / "timing_vs_observations.csv").read_text().splitlines()
        assert lines[0] == TIMING_HEADER
        rows = [line.split(",") for line in lines[1:]]
        assert [(r[0], r[1], r[2]) for r in rows] == [
            ("gp", "observations", "4"), ("gp", "observations", "8")]
        for r in rows:
            assert float(r[3]) >= 0.0 and float(r[4]) >= 0.0
            assert float(r[5]) >= 0.0
            assert r[6] == "3" and r[7] == "3"

    def test_dim_sweep_rows(self, tmp_path):
        out = tmp_path / "a"
        args = ["sweep-dim", "--m", "5", "--n-ens", "6", "--runs", "3",
                "--methods", "gp", "--n-draws", "0", "--seed", "3",
                "--values", "20,30", "--out-dir", str(out)]
        assert main(args) == EXIT_OK
        lines = (out / "timing_vs_dimensions.csv").read_text().splitlines()
        rows = [line.split(",") for line in lines[1:]]
        assert [(r[1], r[2]) for r in rows] == [
            ("dimensions", "20"), ("dimensions", "30")]

    def test_non_timing_columns_stable(self, tmp_path):
        def strip_times(path):
            rows = [line.split(",") for line in
                    path.read_text().splitlines()[1:]]
            return [[c for i, c in enumerate(r) if i not in (3, 4)]
                    for r in rows]

        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(SWEEP_ARGS + ["--out-dir", str(out_a)])
        main(SWEEP_ARGS + ["--out-dir", str(out_b)])
        assert (strip_times(out_a / "timing_vs_observations.csv")
                == strip_times(out_b / "timing_vs_observations.csv"))

    def test_values_from_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("values = 4,8\n")
        out = tmp_path / "a"
        args = [x for x in SWEEP_ARGS if x not in ("--values", "4,8")]
        assert main(args + ["--config", str(cfg),
                            "--out-dir", str(out)]) == EXIT_OK
        lines = (out / "timing_vs_observations.csv").read_text().splitlines()
        assert len(lines) == 3

    def test_bad_values_list(self, tmp_path):
        code = main(SWEEP_ARGS[:-1] + ["4,eight", "--out-dir",
                                       str(tmp_path / "a")])
        assert code == EXIT_BAD_ARGS


class TestChecks:
    def test_equivalence_passes(self, capsys):
        assert main(["equivalence", "--instances", "10", "--seed", "0"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "10 instances" in out

    def test_moments_check_passes(self, capsys):
        assert main(["moments-check", "--draws", "50000",
                     "--seed", "0"]) == EXIT_OK
        assert "PASS" in capsys.readouterr().out

    def test_moments_check_fails_at_tiny_draw_count(self, capsys):
        # 2 draws cannot reproduce the covariance within 5 percent
        assert main(["moments-check", "--draws", "2",
                     "--seed", "0"]) == EXIT_CHECK_FAILED
        assert "FAIL" in capsys.readouterr().out


class TestExitCodes:
    def test_contract_violation_maps_to_bad_args(self, tmp_path, capsys):
        code, _ = run_demo(tmp_path, "a",
                           args=["demo", "--d", "5", "--seed", "0"])
        assert code == EXIT_BAD_ARGS
        assert "d must be >= 10" in capsys.readouterr().err

    def test_unparseable_flag(self):
        assert main(["demo", "--d", "forty"]) == EXIT_BAD_ARGS

    def test_missing_subcommand(self):
        assert main([]) == EXIT_BAD_ARGS

    def test_unknown_subcommand(self):
        assert main(["render"]) == EXIT_BAD_ARGS

    def test_help_exits_zero(self):
        assert main(["--help"]) == EXIT_OK

    def test_unreachable_server(self):
        code = main(["equivalence", "--instances", "2", "--seed", "0",
                     "--server", "http://127.0.0.1:1"])
        assert code == EXIT_NUMERICAL
