"""CLI parsing, commands, exit codes, and the thin-client mode."""

import pytest

import sepconv_lab.cli as cli
from sepconv_lab import read_ppm
from sepconv_lab.bench import CSV_HEADER
from sepconv_lab.cli import Config, entrypoint, main, parse_args


def test_parse_ladder_defaults_and_overrides():
    config = parse_args(["ladder", "--sizes", "64x64", "--reps", "10"])
    assert config.command == "ladder"
    assert config.sizes == ((64, 64),)
    assert config.reps == 10
    assert config.planes == 3
    assert config.cutoff == 100
    assert config.workers == 100
    assert config.kernel is None  # gaussian5
    assert config.seed == 42


def test_parse_reference_default_sizes(monkeypatch):
    monkeypatch.delenv(cli.DESK_ENV_VAR, raising=False)
    config = parse_args(["ladder"])
    assert config.sizes == cli.REFERENCE_SIZES
    assert config.sizes[0] == (1152, 1152)
    assert config.sizes[-1] == (8748, 8748)
    assert config.reps == 1000


def test_parse_desk_scale_sizes(monkeypatch):
    monkeypatch.setenv(cli.DESK_ENV_VAR, "1")
    config = parse_args(["ladder"])
    assert config.sizes == cli.DESK_SIZES
    # explicit sizes win over the env var
    config = parse_args(["ladder", "--sizes", "64x64"])
    assert config.sizes == ((64, 64),)


def test_parse_custom_kernel_verbatim():
    config = parse_args(["convolve", "--kernel", "1,2,1"])
    assert config.kernel == (1.0, 2.0, 1.0)


def test_parse_even_kernel_width_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        parse_args(["convolve", "--kernel", "1,2"])
    assert excinfo.value.code == 1
    assert "odd" in capsys.readouterr().err


def test_parse_malformed_size_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        parse_args(["ladder", "--sizes", "10x"])
    assert excinfo.value.code == 1
    assert "malformed size" in capsys.readouterr().err


def test_parse_unknown_flag_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        parse_args(["ladder", "--bogus"])
    assert excinfo.value.code == 1


def test_gen_then_convolve_round_trip(tmp_path):
    src = tmp_path / "a.ppm"
    dst = tmp_path / "b.ppm"
    assert entrypoint(["gen", "--sizes", "64x64", "--seed", "1", "--out", str(src)]) == 0
    assert entrypoint([
        "convolve", "--in", str(src), "--algorithm", "two-pass", "--out", str(dst),
    ]) == 0
    image = read_ppm(dst)
    assert (image.rows, image.cols, image.plane_count) == (64, 64, 3)


def test_convolve_generic_and_unrolled_produce_identical_files(tmp_path):
    src = tmp_path / "a.ppm"
    entrypoint(["gen", "--sizes", "32x32", "--seed", "5", "--out", str(src)])
    out_generic = tmp_path / "g.ppm"
    out_unrolled = tmp_path / "u.ppm"
    assert entrypoint([
        "convolve", "--in", str(src), "--algorithm", "single-generic", "--out", str(out_generic),
    ]) == 0
    assert entrypoint([
        "convolve", "--in", str(src), "--algorithm", "single-unrolled", "--out", str(out_unrolled),
    ]) == 0
    assert out_generic.read_bytes() == out_unrolled.read_bytes()


def test_convolve_parallel_plan_matches_sequential(tmp_path):
    src = tmp_path / "a.ppm"
    entrypoint(["gen", "--sizes", "32x32", "--seed", "2", "--out", str(src)])
    seq = tmp_path / "seq.ppm"
    par = tmp_path / "par.ppm"
    assert entrypoint(["convolve", "--in", str(src), "--out", str(seq)]) == 0
    assert entrypoint([
        "convolve", "--in", str(src), "--out", str(par),
        "--plan", "taskpool", "--workers", "2", "--cutoff", "4", "--agglomerate",
    ]) == 0
    assert seq.read_bytes() == par.read_bytes()


def test_ladder_writes_csv(tmp_path):
    out = tmp_path / "ladder.csv"
    code = entrypoint([
        "ladder", "--sizes", "24x24", "--reps", "1",
        "--workers", "2", "--cutoff", "4", "--csv", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) > 8


def test_ladder_stage_subset_to_stdout(capsys):
    code = entrypoint([
        "ladder", "--sizes", "24x24", "--reps", "1", "--workers", "2",
        "--cutoff", "4", "--stages", "Opt-0,Opt-4",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith(CSV_HEADER)
    assert "Opt-4" in out


def test_overhead_command(capsys):
    code = entrypoint(["overhead", "--workers", "2", "--cutoff", "8", "--reps", "5"])
    assert code == 0
    assert "per-launch overhead" in capsys.readouterr().out


def test_ladder_correctness_failure_exits_two(monkeypatch, tmp_path, capsys):
    import sepconv_lab.bench as bench

    monkeypatch.setattr(
        bench, "check_stage_output", lambda *args: "injected mismatch"
    )
    code = entrypoint([
        "ladder", "--sizes", "24x24", "--reps", "1", "--workers", "2",
        "--cutoff", "4", "--stages", "Opt-4", "--csv", str(tmp_path / "out.csv"),
    ])
    assert code == 2
    assert "correctness failure" in capsys.readouterr().err


def test_gen_requires_out(capsys):
    with pytest.raises(SystemExit) as excinfo:
        parse_args(["gen", "--sizes", "16x16"])
    assert excinfo.value.code == 1


def test_missing_input_file_is_operational_error(tmp_path, capsys):
    code = entrypoint(["convolve", "--in", str(tmp_path / "missing.ppm")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_agglomerate_without_taskpool_is_operational_error(tmp_path, capsys):
    src = tmp_path / "a.ppm"
    entrypoint(["gen", "--sizes", "16x16", "--out", str(src)])
    code = entrypoint([
        "convolve", "--in", str(src), "--plan", "static", "--agglomerate",
    ])
    assert code == 1
    assert "task pool" in capsys.readouterr().err


def test_main_dispatches_parsed_config(tmp_path):
    config = parse_args(["gen", "--sizes", "16x16", "--out", str(tmp_path / "x.ppm")])
    assert isinstance(config, Config)
    assert main(config) == 0
    assert (tmp_path / "x.ppm").exists()


def test_parse_serve_command():
    config = parse_args(["serve", "--host", "0.0.0.0", "--port", "9001"])
    assert (config.command, config.host, config.port) == ("serve", "0.0.0.0", 9001)


# --- thin-client mode -------------------------------------------------------

@pytest.fixture
def service_client(monkeypatch):
    """Point the CLI's HTTP client at the in-process app."""
    from fastapi.testclient import TestClient

    from sepconv_lab.service import app

    monkeypatch.setattr(cli, "_open_client", lambda base_url: TestClient(app))


def test_remote_gen_and_convolve(service_client, tmp_path):
    src = tmp_path / "remote.ppm"
    dst = tmp_path / "remote-out.ppm"
    assert entrypoint([
        "gen", "--sizes", "16x16", "--seed", "3", "--out", str(src),
        "--server", "http://bench",
    ]) == 0
    local = tmp_path / "local.ppm"
    entrypoint(["gen", "--sizes", "16x16", "--seed", "3", "--out", str(local)])
    assert src.read_bytes() == local.read_bytes()
    assert entrypoint([
        "convolve", "--in", str(src), "--out", str(dst), "--server", "http://bench",
    ]) == 0
    local_out = tmp_path / "local-out.ppm"
    entrypoint(["convolve", "--in", str(src), "--out", str(local_out)])
    assert dst.read_bytes() == local_out.read_bytes()


def test_remote_ladder_and_overhead(service_client, tmp_path, capsys):
    out = tmp_path / "remote.csv"
    code = entrypoint([
        "ladder", "--sizes", "24x24", "--reps", "1", "--workers", "2", "--cutoff", "4",
        "--stages", "Opt-0,Par-4", "--csv", str(out), "--server", "http://bench",
    ])
    assert code == 0
    assert out.read_text().startswith(CSV_HEADER)
    code = entrypoint([
        "overhead", "--workers", "2", "--cutoff", "4", "--reps", "3",
        "--server", "http://bench",
    ])
    assert code == 0
    assert "per-launch overhead" in capsys.readouterr().out


def test_remote_error_maps_to_exit_one(service_client, tmp_path, capsys):
    src = tmp_path / "a.ppm"
    entrypoint(["gen", "--sizes", "16x16", "--out", str(src)])
    code = entrypoint([
        "convolve", "--in", str(src), "--plan", "static", "--agglomerate",
        "--server", "http://bench",
    ])
    assert code == 1
    assert "server error 400" in capsys.readouterr().err
