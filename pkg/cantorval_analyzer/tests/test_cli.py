import json
from fractions import Fraction

import pandas as pd
from sqlalchemy import func, select
from sqlalchemy.orm import sessionmaker

from cantorval_analyzer.src import verification
from cantorval_analyzer.src.database import Report, init_db
from cantorval_analyzer.src.exact_numerics import IntervalSet
from cantorval_analyzer.src.main import app
from cantorval_analyzer.src.models import BracketRow


def _read(path):
    return json.loads(path.read_text())


def test_cover_json(runner, tmp_path, level_one):
    out = tmp_path / "cover.json"
    result = runner.invoke(app, ["cover", "--series", "mg(3,2;1/4)", "--depth", "2", "--output", str(out)])
    assert result.exit_code == 0
    data = _read(out)
    assert data["schema_version"] == "1.0"
    assert data["measure"] == "3/2"
    assert data["cover"] == [
        {"lo": "0/1", "hi": "5/12"},
        {"lo": "1/2", "hi": "7/6"},
        {"lo": "5/4", "hi": "5/3"},
    ]
    # exact round trip
    assert IntervalSet.from_json(data["cover"]) == level_one


def test_cover_csv_with_gaps(runner, tmp_path):
    out = tmp_path / "cover.csv"
    result = runner.invoke(
        app, ["cover", "--series", "mg(3,2;1/4)", "--depth", "2", "--format", "csv", "--output", str(out)]
    )
    assert result.exit_code == 0
    df = pd.read_csv(out, dtype=str)
    assert list(df["lo"]) == ["0/1", "1/2", "5/4"]

    out = tmp_path / "gaps.json"
    result = runner.invoke(
        app, ["cover", "--series", "mg(3,2;1/4)", "--depth", "4", "--gaps", "--output", str(out)]
    )
    assert result.exit_code == 0
    assert any(g["gap"] == {"lo": "5/12", "hi": "1/2"} for g in _read(out)["gaps"])


def test_classify(runner, tmp_path):
    out = tmp_path / "classify.json"
    result = runner.invoke(app, ["classify", "--series", "geom(2;1/3)", "--max-depth", "6", "--output", str(out)])
    assert result.exit_code == 0
    assert _read(out)["verdict"] == "CantorLike"

    result = runner.invoke(app, ["classify", "--series", "mg(3,2;1/4)", "--output", str(out)])
    assert result.exit_code == 0
    data = _read(out)
    assert data["verdict"] == "CantorvalCandidate"
    assert data["certificate"]["gap_witness"]["gap"] == {"lo": "5/12", "hi": "1/2"}


def test_usage_errors_exit_2(runner, tmp_path):
    result = runner.invoke(app, ["classify", "--series", "mg(3,2;5/4)"])
    assert result.exit_code == 2
    result = runner.invoke(app, ["cover", "--series", "xm(1)", "--depth", "2", "--format", "xml"])
    assert result.exit_code == 2
    result = runner.invoke(app, ["verify", "--m", "1", "--suite", "bogus"])
    assert result.exit_code == 2
    result = runner.invoke(app, ["cover", "--series", "xm(1)"])
    assert result.exit_code == 2


def test_budget_from_environment_exits_3(runner):
    result = runner.invoke(
        app, ["cover", "--series", "geom(2;1/3)", "--depth", "12"], env={"CANTORVAL_BUDGET": "10"}
    )
    assert result.exit_code == 3
    result = runner.invoke(app, ["ifs", "--m", "1", "--level", "3"], env={"CANTORVAL_BUDGET": "many"})
    assert result.exit_code == 2


def test_ifs(runner, tmp_path):
    out = tmp_path / "ifs.json"
    result = runner.invoke(app, ["ifs", "--m", "1", "--level", "1", "--output", str(out)])
    assert result.exit_code == 0
    data = _read(out)
    assert data["outer_measure"] == "3/2"
    # [2/3, 1] plus the new copies [1/6, 1/4] and [17/12, 3/2]
    assert data["inner_measure"] == "1/2"
    assert [f["offset"] for f in data["maps"]] == ["0/1", "1/2", "3/4", "5/4"]
    assert data["components"] == 3


def test_geometry_discrepancies(runner, tmp_path):
    out = tmp_path / "geometry.json"
    result = runner.invoke(
        app, ["geometry", "--m", "2", "--levels", "3", "--paper-discrepancies", "--output", str(out)]
    )
    assert result.exit_code == 0
    data = _read(out)
    found = {d["name"]: d for d in data["discrepancies"]}
    assert len(found) == 3
    assert found["neighbor_distance_general_m"]["stated"] == "1/30"
    assert found["neighbor_distance_general_m"]["derived"] == "1/10"

    # short alias
    result = runner.invoke(app, ["geometry", "--m", "1", "--discrepancies", "--output", str(out)])
    assert result.exit_code == 0
    found = {d["name"]: d for d in _read(out)["discrepancies"]}
    assert found["symmetric_distance_summation"]["stated"] == "-1/6"
    assert found["symmetric_distance_summation"]["derived"] == "5/6"


def test_dimension(runner, tmp_path):
    out = tmp_path / "dimension.json"
    result = runner.invoke(app, ["dimension", "--m", "1", "--kmax", "6", "--output", str(out)])
    assert result.exit_code == 0
    data = _read(out)
    assert data["closed_form"] == "log(3)/log(4)"
    assert data["numeric_root"].startswith("0.79248125")
    assert [row["count"] for row in data["box_table"]] == [4, 12, 36, 108, 324, 972]

    out = tmp_path / "dimension.csv"
    result = runner.invoke(app, ["dimension", "--m", "1", "--kmax", "4", "--format", "csv", "--output", str(out)])
    assert result.exit_code == 0
    assert list(pd.read_csv(out).columns) == ["k", "epsilon", "count", "scaled"]


def test_measure(runner, tmp_path):
    out = tmp_path / "measure.json"
    result = runner.invoke(app, ["measure", "--m", "1", "--depth", "3", "--output", str(out)])
    assert result.exit_code == 0
    rows = _read(out)["rows"]
    assert [r["outer"] for r in rows] == ["5/3", "3/2", "11/8", "41/32"]
    assert rows[0]["inner"] == "1/3"


def test_render(runner, tmp_path):
    out = tmp_path / "levels.svg"
    result = runner.invoke(app, ["render", "--target", "levels", "--m", "1", "--level", "3", "--output", str(out)])
    assert result.exit_code == 0
    assert out.read_text().count('class="bar"') == 1 + 3 + 9 + 27


def test_verify(runner, tmp_path):
    out = tmp_path / "verify.json"
    result = runner.invoke(app, ["verify", "--m", "1", "--suite", "all", "--max-level", "4", "--output", str(out)])
    assert result.exit_code == 0
    data = _read(out)
    assert data["passed"]
    assert data["failures"] == []
    assert {r["suite"] for r in data["results"]} == {
        "bt", "equivalence", "geometry", "symmetry", "central", "measure", "dimension", "classify", "discrepancies"
    }
    assert all(r["reference"] for r in data["results"])
    assert "bracket_width[m=1,d=12]" in {r["name"] for r in data["results"]}


def _wide_brackets(sys, depth, budget=None):
    return [
        BracketRow(depth=d, inner=Fraction(0), outer=Fraction(100), width=Fraction(100), gap_length=Fraction(0))
        for d in range(depth + 1)
    ]


def test_verify_failure_exits_1(runner, tmp_path, monkeypatch):
    monkeypatch.setattr(verification, "measure_bracket", _wide_brackets)
    out = tmp_path / "verify.json"
    result = runner.invoke(
        app, ["verify", "--m", "1", "--suite", "measure", "--max-level", "2", "--output", str(out)]
    )
    assert result.exit_code == 1
    data = _read(out)
    assert not data["passed"]
    failed = {f["name"]: f for f in data["failures"]}
    width = failed["bracket_width[m=1,d=12]"]
    assert width["reference"] == "Lebesgue measure of X(1) is 1"
    assert width["detail"] == "width=100.000000"
    assert "inner_increasing[m=1]" in failed


def test_db_ledger(runner, tmp_path):
    db = tmp_path / "runs.db"
    args = ["--db", str(db), "cover", "--series", "xm(1)", "--depth", "2", "--output", str(tmp_path / "c.json")]
    assert runner.invoke(app, args).exit_code == 0
    assert runner.invoke(app, args).exit_code == 0
    session = sessionmaker(bind=init_db(str(db)))()
    assert session.execute(select(func.count()).select_from(Report)).scalar_one() == 1
