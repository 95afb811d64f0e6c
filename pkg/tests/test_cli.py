import subprocess
import sys

import pytest

from tifu_fp.cli import (
    EXIT_ASSUMPTION,
    EXIT_ETA,
    EXIT_INVALID,
    EXIT_IO,
    EXIT_MATRIX,
    EXIT_USAGE,
    CliError,
    main,
    parse_args,
)

GAME = ["--m1", "1,5,3,2", "--m2", "4,1,3,5", "--tau1", "0.5", "--tau2", "0.3"]


def test_parse_args_builds_game():
    cfg = parse_args(["tifu", *GAME, "--eta", "0.01", "--steps", "100", "--seed", "4"])
    assert cfg.game.m2.b == 1.0 and cfg.game.m2.c == 3.0  # e,g,f,h row-major
    assert (cfg.eta, cfg.steps, cfg.seed) == (0.01, 100, 4)


def test_ne_benchmark(capsys):
    assert main(["ne", *GAME]) == 0
    out = capsys.readouterr().out
    assert "rbar1 = (0.791912, 0.208088)" in out
    assert "rbar2 = (0.466351, 0.533649)" in out
    assert "eta0 = 0.255263" in out


def test_ne_symmetric(capsys):
    assert main(["ne", "--m1", "0,1,1,0", "--m2", "1,0,0,1", "--tau1", "0.5", "--tau2", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "(0.500000, 0.500000)" in out and "eta0 = 1.000000" in out


@pytest.mark.parametrize("argv, code", [
    (["ne", "--m1", "1,5,3,2", "--tau1", "0.5", "--tau2", "0.3"], EXIT_USAGE),
    (["ne", *GAME, "--bogus"], EXIT_USAGE),
    (["ne", "--m1", "1,5,3", "--m2", "4,1,3,5", "--tau1", "0.5", "--tau2", "0.3"], EXIT_MATRIX),
    (["ne", "--m1", "1,5,nan,2", "--m2", "4,1,3,5", "--tau1", "0.5", "--tau2", "0.3"], EXIT_MATRIX),
    (["ne", "--m1", "3,2,1,5", "--m2", "4,1,3,5", "--tau1", "0.5", "--tau2", "0.3"], EXIT_ASSUMPTION),
    (["tifu", *GAME, "--eta", "1.2"], EXIT_ETA),
    (["mean", *GAME, "--eta", "0"], EXIT_ETA),
    (["ne", "--m1", "1,5,3,2", "--m2", "4,1,3,5", "--tau1", "0", "--tau2", "0.3"], EXIT_INVALID),
    (["afp", *GAME, "--window", "1"], EXIT_INVALID),
])
def test_error_codes(argv, code, capsys):
    assert main(argv) == code
    err = capsys.readouterr().err.strip()
    assert err.startswith("error:") and "\n" not in err


def test_allow_any_game_for_play(capsys):
    bad = ["--m1", "3,2,1,5", "--m2", "4,1,3,5", "--tau1", "0.5", "--tau2", "0.3"]
    assert main(["tifu", *bad, "--eta", "0.1", "--steps", "20"]) == EXIT_ASSUMPTION
    assert main(["tifu", *bad, "--eta", "0.1", "--steps", "20", "--allow-any-game"]) == 0
    # the equilibrium solver still needs the sign structure
    assert main(["ne", *bad, "--allow-any-game"]) == EXIT_ASSUMPTION


def test_help_documents_flags(capsys):
    assert main(["tifu", "--help"]) == 0
    out = capsys.readouterr().out
    for flag in ("--m1", "--m2", "--tau1", "--tau2", "--eta", "--steps", "--seed", "--out",
                 "--svg", "--stride", "e,g,f,h"):
        assert flag in out
    assert main(["afp", "--help"]) == 0
    out = capsys.readouterr().out
    assert "--window" in out and "--eta-min" in out


def test_io_error_code(tmp_path):
    out = tmp_path / "nope" / "x.csv"
    assert main(["tvfu", *GAME, "--steps", "10", "--out", str(out)]) == EXIT_IO


def test_cli_outputs_are_byte_identical(tmp_path):
    paths = []
    for name in ("a", "b"):
        csv_path, svg_path = tmp_path / f"{name}.csv", tmp_path / f"{name}.svg"
        argv = ["afp", *GAME, "--steps", "500", "--seed", "7", "--out", str(csv_path),
                "--svg", str(svg_path)]
        assert main(argv) == 0
        paths.append((csv_path, svg_path))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


@pytest.mark.parametrize("mode", [["mean", "--eta", "0.25"],
                                  ["flow", "--dt", "0.1", "--t-end", "5"],
                                  ["threshold", "--eta", "0.26"],
                                  ["tvfu", "--steps", "30"]])
def test_modes_run(mode, tmp_path, capsys):
    argv = [mode[0], *GAME, *mode[1:]]
    if mode[0] not in ("threshold",):
        argv += ["--out", str(tmp_path / "t.csv")]
    assert main(argv) == 0
    if mode[0] == "threshold":
        assert "not stable" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tifu_fp", "ne", *GAME],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "eta0" in proc.stdout


def test_parse_args_raises_cli_error():
    with pytest.raises(CliError) as info:
        parse_args(["mean", *GAME])
    assert info.value.code == EXIT_USAGE
