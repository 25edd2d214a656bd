import pytest

from rqi.config import MAX_SWEEP, ConfigError, SweepSpec, load_config, parse_config


def test_defaults_and_overrides():
    cfg = parse_config("[run]\nexperiment = harvest\n[harvest]\nL = 3\n")
    assert cfg.experiment == "harvest" and cfg.params["L"] == 3.0 and cfg.params["sigma"] == 0.01
    assert cfg.sweep is None and cfg.tolerances["scale"] == 1.0


def test_sweep_values():
    cfg = parse_config("[run]\nexperiment = metric\n[sweep]\nparam = L\nstart = 0.01\nstop = 1\n"
                       "count = 3\nscale = log\n")
    assert list(cfg.sweep.values()) == pytest.approx([0.01, 0.1, 1.0])


@pytest.mark.parametrize("text,msg", [
    ("[harvest]\nL = 1\n", "missing [run]"),
    ("[run]\nexperiment = nope\n", "unknown experiment"),
    ("[run]\nexperiment = harvest\n[harvest]\nLength = 1\n", "valid:"),
    ("[run]\nexperiment = harvest\n[extra]\na = 1\n", "unknown section"),
    ("[run]\nexperiment = harvest\ncolour = red\n", "unknown key"),
    ("[run]\nexperiment = modes\n[modes]\nN = 1.5\n", "integer"),
    ("[run]\nexperiment = harvest\n[harvest]\nL = abc\n", "[harvest] L"),
    ("[run]\nexperiment = harvest\n[tolerances]\nscale = -1\n", "positive"),
    ("[run]\nexperiment = harvest\n[sweep]\nparam = L\nstart = 0\n", "missing"),
    ("[run]\nexperiment = propagator\n[sweep]\nparam = kind\nstart = 0\nstop = 1\ncount = 2\n",
     "cannot be swept"),
    ("[run]\nexperiment = metric\n[metric]\nchart = polar\n", "expected one of"),
    ("not an ini", "cannot parse"),
])
def test_rejections(text, msg):
    with pytest.raises(ConfigError, match=msg.replace("[", r"\[")):
        parse_config(text)


def test_integer_given_as_float_is_accepted():
    assert parse_config("[run]\nexperiment = modes\n[modes]\nN = 2.0\n").params["N"] == 2


def test_sweep_limits():
    with pytest.raises(ConfigError):
        SweepSpec("L", 0, 1, MAX_SWEEP + 1)
    with pytest.raises(ConfigError):
        SweepSpec("L", 0, 1, 0)
    with pytest.raises(ConfigError):
        SweepSpec("L", 0, 1, 3, "log")
    with pytest.raises(ConfigError):
        SweepSpec("L", 0, float("inf"), 3)
    assert len(SweepSpec("L", 0, 1, MAX_SWEEP).values()) == MAX_SWEEP


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "none.ini")
