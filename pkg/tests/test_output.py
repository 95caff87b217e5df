import json
import math

import pandas as pd
import pytest

from ramancomb.utils.output import SCHEMA, render, render_csv, render_json, write_table


@pytest.fixture
def frame():
    return pd.DataFrame(
        {
            "kappa_L": [0.0, 0.1],
            "g2[1]": [math.nan, 0.8],
            "mean_photon[1]": [0.0, 0.012468776019362405],
        }
    )


def test_csv_has_schema_line_and_full_precision(frame):
    text = render_csv(frame)
    lines = text.splitlines()
    assert lines[0] == f"# {SCHEMA}"
    assert lines[1] == "kappa_L,g2[1],mean_photon[1]"
    assert lines[2] == "0,,0"
    assert lines[3].startswith("0.10000000000000001,0.80000000000000004,")
    assert float(lines[3].split(",")[2]) == frame["mean_photon[1]"][1]


def test_json_document(frame):
    document = json.loads(render_json(frame, {"mode": "single"}))
    assert document["schema"] == SCHEMA
    assert document["config"] == {"mode": "single"}
    assert document["rows"][0] == {"kappa_L": 0.0, "g2[1]": None, "mean_photon[1]": 0.0}
    assert document["rows"][1]["mean_photon[1]"] == 0.012468776019362405


def test_unknown_format(frame):
    with pytest.raises(ValueError):
        render(frame, "xml")


def test_write_to_file_and_stdout(frame, tmp_path, capsys):
    path = tmp_path / "nested" / "table.json"
    text = write_table(frame, path, "json")
    assert path.read_text() == text
    write_table(frame, None, "csv")
    assert capsys.readouterr().out.startswith(f"# {SCHEMA}\n")
