# Pytest configuration
import pytest
from typer.testing import CliRunner

from cantorval_analyzer.src.exact_numerics import IntervalSet
from cantorval_analyzer.src.ifs_engine import build_ifs
from cantorval_analyzer.src.series_model import parse_series


@pytest.fixture
def guthrie_nymann():
    return parse_series("mg(3,2;1/4)")


@pytest.fixture
def ifs1():
    return build_ifs(1)


@pytest.fixture
def level_one():
    # W(I) for m = 1, also the depth-2 cover of mg(3,2;1/4)
    return IntervalSet.of(("0", "5/12"), ("1/2", "7/6"), ("5/4", "5/3"))


@pytest.fixture
def runner(monkeypatch):
    monkeypatch.delenv("CANTORVAL_BUDGET", raising=False)
    return CliRunner()
