import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppp_ase import ConfigurationError, DomainError
from ppp_ase.config import load_config, parse_config
from ppp_ase.table import SweepTable, format_value

FULL = """
lambda = 0.2
alpha = 3.5
p = 0.4
output = out.csv

[sweep]
variable = lambda
start = 0.01
stop = 1
count = 5
spacing = log

[mc]
n = 2000
seed = 7
radius = 80
"""


def test_full_config():
    config = parse_config(FULL)
    assert config.params.lam == 0.2 and config.params.alpha == 3.5
    assert config.output_path == "out.csv"
    values = config.sweep.values()
    assert len(values) == 5 and values[0] == pytest.approx(0.01) and values[-1] == pytest.approx(1.0)
    assert config.sweep.field == "lam"
    assert config.mc.n == 2000 and config.mc.seed == 7 and config.mc.radius.fixed == 80.0


def test_overrides_and_tau_db(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(FULL)
    config = load_config(path, ["p=0.7", "mc.seed=3", "tau_db=10"])
    assert config.params.p == 0.7 and config.mc.seed == 3
    assert config.params.tau == pytest.approx(10.0)


def test_defaults():
    config = parse_config("")
    assert config.sweep is None and config.mc is None and config.output_path is None
    assert config.params.alpha == 4.0


@pytest.mark.parametrize("text, message", [
    ("lamda = 0.1", "unknown key"),
    ("[plot]\nx = 1", "unknown section"),
    ("[sweep]\nvariable = alpha\nstart = 3\nstop = 4\ncount = 3", "sweep variable"),
    ("[sweep]\nvariable = p\nstart = 0.1\nstop = 0.9\ncount = 1", "count"),
    ("[sweep]\nvariable = p\nstart = 0.1\nstop = 0.9", "missing"),
    ("[sweep]\nvariable = p\nstart = 0\nstop = 0.9\ncount = 3\nspacing = log", "log spacing"),
    ("[mc]\nn = 1.5", "integer"),
    ("[mc]\nseed = -1", "non-negative"),
    ("p = abc", "not a number"),
    ("tau = 1\ntau_db = 0", "not both"),
    ("no equals sign here", "malformed"),
])
def test_config_errors(text, message):
    with pytest.raises(ConfigurationError, match=message):
        parse_config(text)


def test_sweep_bounds_respect_domain():
    with pytest.raises(DomainError):
        parse_config("[sweep]\nvariable = p\nstart = 0.5\nstop = 1.5\ncount = 3")


def test_bad_override():
    with pytest.raises(ConfigurationError):
        parse_config("", ["p"])


def test_table_serialization():
    table = SweepTable(["x", "delay", "tag"])
    table.add(0.1, math.inf, "ok")
    text = table.to_csv()
    assert text == "x,delay,tag\n0.10000000000000001,inf,ok\n"
    assert SweepTable.from_csv(text).rows == [[0.1, math.inf, "ok"]]
    with pytest.raises(ValueError):
        table.add(1.0)


def test_format_value_types():
    assert format_value(True) == "1" and format_value(3) == "3"
    assert format_value(-math.inf) == "-inf" and format_value(math.nan) == "nan"


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(allow_nan=False), st.floats(allow_nan=False, allow_infinity=False)),
                min_size=1, max_size=20))
def test_csv_round_trip(rows):
    table = SweepTable(["a", "b"], [list(r) for r in rows])
    back = SweepTable.from_csv(table.to_csv())
    assert back.columns == table.columns
    assert back.rows == table.rows
