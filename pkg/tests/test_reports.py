import json
import math

import numpy as np
import pytest

from summakit.reports import (
    SUMMABILITY_HEADER,
    csv_text,
    format_float,
    to_json,
    validate_path,
    validate_paths,
    write_csv,
    write_json,
)


class TestFormatting:
    @pytest.mark.parametrize("x", [0.1, 1 / 3, -2.5e-300, 1e22, math.pi, 5e-324])
    def test_round_trip(self, x):
        assert float(format_float(x)) == x

    def test_integral_and_specials(self):
        assert format_float(3.0) == "3.0"
        assert format_float(math.inf) == "Infinity"
        assert format_float(-math.inf) == "-Infinity"
        assert format_float(math.nan) == "NaN"

    def test_seventeen_digits(self):
        assert format_float(0.1) == "0.10000000000000001"

    def test_no_thousands_separator(self):
        assert "," not in format_float(1234567.125)


class TestJson:
    def test_parseable_with_specials(self):
        text = to_json({"a": [1, 2.5, math.inf], "b": None, "c": "x\"y", "d": True, "e": math.nan})
        doc = json.loads(text)
        assert doc["a"][2] == math.inf and math.isnan(doc["e"]) and doc["c"] == 'x"y'

    def test_key_order_preserved(self):
        assert list(json.loads(to_json({"z": 1, "a": 2}))) == ["z", "a"]

    def test_numpy_scalars(self):
        assert json.loads(to_json({"x": np.float64(0.1), "n": np.int64(3)})) == {"x": 0.1, "n": 3}


class TestFiles:
    def test_atomic_writes_leave_no_temp(self, tmp_path):
        write_json(tmp_path / "a" / "x.json", {"k": 1})
        write_csv(tmp_path / "a" / "y.csv", ("n", "v"), [(0, 0.5)])
        assert sorted(p.name for p in (tmp_path / "a").iterdir()) == ["x.json", "y.csv"]

    def test_csv_newlines(self):
        text = csv_text(("n", "v"), [(0, 0.5), (1, 0.25)])
        assert text == "n,v\n0,0.5\n1,0.25\n"

    def test_validator_accepts_good_csv(self, tmp_path):
        rows = [(n, 0.0, 0.0, float(n), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0) for n in range(5)]
        p = write_csv(tmp_path / "summability.csv", SUMMABILITY_HEADER, rows)
        assert validate_path(p) == []

    HEADER = "n,T_n,dT_n,alpha_n,increment,partial,Tn1,Tn2,Tn3,Tn4"

    def test_validator_flags_cell_problems(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(self.HEADER + "\r\n0,0,0,0,0,1,0,0,0,0\n1,0,0,0,0,0.5,0,0,x\n", encoding="utf-8")
        text = " ".join(validate_path(bad))
        assert "carriage" in text and "expected 10 fields" in text

    def test_validator_flags_structure(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(self.HEADER + "\n0,0,0,0,0,1,0,0,0,0\n2,0,0,0,0,0.5,0,0,0,0\n", encoding="utf-8")
        text = " ".join(validate_path(bad))
        assert "decreases" in text and "0..N-1" in text

    def test_validator_flags_bad_certificate(self, tmp_path):
        p = tmp_path / "T1.json"
        p.write_text(to_json({"id": "T1", "verdict": "maybe"}), encoding="utf-8")
        assert validate_path(p)

    def test_validator_missing_file(self, tmp_path):
        assert validate_paths([tmp_path / "nope.json"])

    def test_validator_directory(self, tmp_path):
        write_json(tmp_path / "x.json", {"anything": 1})
        assert validate_paths([tmp_path]) == []
