from conetorsion.runConfig import CHECKS, COMMANDS, RunConfig, build_config, read_config
import pytest


def _write(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_defaults():
    config = RunConfig(command="heat").validated()
    assert config.times == [0.05, 0.2, 1.0]
    assert config.checks == list(CHECKS)
    assert config.cutoff is None
    assert config.method == "solver"
    assert set(COMMANDS) == {"spectrum", "green", "heat", "torsion"}


@pytest.mark.parametrize("overrides", [{"command": "plot"}, {"k": 0}, {"k": 1.5}, {"m": 0},
                                       {"degree": -1}, {"cutoff": 0.0},
                                       {"flavor": "dirichlet"}, {"checks": ["jump", "trace"]},
                                       {"times": []}, {"times": [0.1, -0.2]}, {"pairs": 0},
                                       {"method": "fourier"}, {"dt": 0.0}, {"h": -1.0},
                                       {"length": 0.0}, {"grid_ratio": 1.0}, {"levels": 0},
                                       {"zeta_method": "heat"}, {"threads": 0}])
def test_validated_rejects(overrides):
    config = RunConfig(command="green").merged(overrides)
    with pytest.raises(ValueError):
        config.validated()


def test_merged_ignores_none_and_unknown():
    config = RunConfig(command="heat", pairs=5)
    merged = config.merged({"pairs": None, "seed": 3, "colour": "red"})
    assert merged.pairs == 5
    assert merged.seed == 3
    assert config.seed == 0


def test_echo_drops_output_switches():
    echo = RunConfig(command="torsion", json=True).echo()
    assert "json" not in echo
    assert "quiet" not in echo
    assert echo["command"] == "torsion"


def test_read_config_sections(tmp_path):
    path = _write(tmp_path, "[general]\nseed = 7\njson = yes\n\n"
                            "[heat]\nk = 2\ntimes = 0.05, 0.2, 1.0\npairs = 20\n\n"
                            "[green]\nflavor = relative\n")
    values = read_config(path, "heat")
    assert values == {"seed": 7, "json": True, "k": 2, "times": [0.05, 0.2, 1.0],
                      "pairs": 20}
    assert read_config(path, "green")["flavor"] == "relative"
    assert "k" not in read_config(path, "torsion")


def test_read_config_lists(tmp_path):
    path = _write(tmp_path, "[green]\nchecks = jump, ode\ncutoff = 50\n")
    values = read_config(path, "green")
    assert values["checks"] == ["jump", "ode"]
    assert values["cutoff"] == 50.0


@pytest.mark.parametrize("text", ["[heat]\ncolour = red\n", "[heat]\ncommand = green\n",
                                  "[heat]\npairs = many\n"])
def test_read_config_invalid(tmp_path, text):
    with pytest.raises(ValueError):
        read_config(_write(tmp_path, text), "heat")


def test_read_config_missing_file(tmp_path):
    with pytest.raises(OSError):
        read_config(str(tmp_path / "missing.ini"), "heat")


def test_build_config_precedence(tmp_path):
    path = _write(tmp_path, "[general]\nseed = 7\n\n[heat]\npairs = 20\nk = 3\n")
    config = build_config("heat", {"pairs": 4}, path)
    assert config.pairs == 4
    assert config.seed == 7
    assert config.k == 3
    assert build_config("heat", {}).pairs == 20


def test_build_config_validates():
    with pytest.raises(ValueError):
        build_config("heat", {"k": 0})
