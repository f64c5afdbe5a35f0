"""CLI contract: documents, formats, determinism, exit codes."""

import json
import math

import pytest

from mheight import PHI
from mheight.cli import run

SQRT5 = math.sqrt(5.0)


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


class TestGen:
    def test_polygonal_matrix_document(self, capsys):
        code, out = invoke(capsys, "gen", "--family", "dual-polygonal", "--n", "4")
        assert code == 0
        doc = json.loads(out)
        assert doc["k"] == 2 and doc["n"] == 4
        assert doc["family"] == "dual-polygonal"
        col3 = doc["columns"][3]
        assert col3[0] == pytest.approx(-math.sqrt(2) / 2)
        assert col3[1] == pytest.approx(math.sqrt(2) / 2)

    def test_icosahedral_matrix_document(self, capsys):
        code, out = invoke(capsys, "gen", "--family", "dual-icosahedral")
        doc = json.loads(out)
        assert code == 0 and doc["k"] == 3 and doc["n"] == 6
        assert doc["columns"][0] == pytest.approx([0.0, 1.0, PHI])


class TestHeight:
    def test_lp_infinite_rendered_as_string(self, capsys):
        code, out = invoke(capsys, "height", "--family", "dual-polygonal",
                           "--n", "3", "--m", "2", "--method", "lp")
        assert code == 0
        assert json.loads(out)["value"] == "inf"

    @pytest.mark.parametrize("method", ["closed", "lp", "search"])
    def test_methods_agree_on_icosahedral_m1(self, capsys, method):
        code, out = invoke(capsys, "height", "--family", "dual-icosahedral",
                           "--m", "1", "--method", method)
        assert code == 0
        value = json.loads(out)["value"]
        assert value == pytest.approx(SQRT5, rel=1e-4)

    def test_search_resolution_flag(self, capsys):
        code, out = invoke(capsys, "height", "--family", "dual-icosahedral",
                           "--m", "3", "--method", "search", "--resolution", "500")
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(2 + SQRT5, rel=1e-4)


class TestProfile:
    def test_lp_profile_matches_expected_rows(self, capsys):
        code, out = invoke(capsys, "profile", "--family", "dual-icosahedral",
                           "--method", "lp")
        assert code == 0
        doc = json.loads(out)
        values = [row["value"] for row in doc["heights"]]
        assert values[0] == pytest.approx(SQRT5, rel=1e-9)
        assert values[1] == pytest.approx(SQRT5, rel=1e-9)
        assert values[2] == pytest.approx(2 + SQRT5, rel=1e-9)
        assert values[3] == "inf" and values[4] == "inf"

    def test_csv_profile(self, capsys):
        code, out = invoke(capsys, "profile", "--family", "dual-dodecahedral",
                           "--method", "closed", "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "m,value"
        assert len(lines) == 10
        assert lines[1] == f"1,{format(3.0 / SQRT5, '.17g')}"
        assert lines[8] == "8,inf" and lines[9] == "9,inf"
        assert all("," in line and " " not in line for line in lines)

    def test_polygonal_profile_lengths(self, capsys):
        code, out = invoke(capsys, "profile", "--family", "dual-polygonal",
                           "--n", "6", "--method", "closed")
        doc = json.loads(out)
        assert len(doc["heights"]) == 5


class TestCapability:
    def test_ratio_mode(self, capsys):
        code, out = invoke(capsys, "capability", "--family", "dual-icosahedral",
                           "--ratio", "6.5")
        assert code == 0
        doc = json.loads(out)
        assert doc["pairs"] == [[1, 0], [0, 2], [0, 1]]

    def test_spec_mode(self, capsys):
        code, out = invoke(capsys, "capability", "--family", "dual-dodecahedral",
                           "--tau", "1", "--sigma", "0", "--delta", "1",
                           "--Delta", "7")
        assert code == 0
        doc = json.loads(out)
        assert doc["feasible"] is True
        assert doc["required_ratio"] == pytest.approx(2 * (PHI + 1), rel=1e-12)

    def test_missing_mode_is_domain_error(self, capsys):
        code, out = invoke(capsys, "capability", "--family", "dual-icosahedral")
        assert code == 1
        assert "error" in json.loads(out)


class TestVerify:
    def test_cross_check_suite_passes(self, capsys):
        code, out = invoke(capsys, "verify", "--suite", "cross-check",
                           "--samples", "0")
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert len(doc["checks"]) == 12

    def test_candidates_suite_passes(self, capsys):
        code, out = invoke(capsys, "verify", "--suite", "candidates")
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_randomized_suite_with_seed(self, capsys):
        code, out = invoke(capsys, "verify", "--suite", "icos-chain",
                           "--samples", "50", "--seed", "3")
        assert code == 0
        doc = json.loads(out)
        assert doc["seed"] == 3 and doc["passed"] is True


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ("profile", "--family", "dual-dodecahedral", "--method", "lp"),
        ("height", "--family", "dual-polygonal", "--n", "9", "--m", "3",
         "--method", "search"),
        ("verify", "--suite", "dode-ranks", "--samples", "100", "--seed", "0"),
        ("gen", "--family", "dual-dodecahedral"),
    ])
    def test_byte_identical_reruns(self, capsys, argv):
        code1, out1 = invoke(capsys, *argv)
        code2, out2 = invoke(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_seventeen_digit_floats(self, capsys):
        _, out = invoke(capsys, "profile", "--family", "dual-icosahedral",
                        "--method", "closed")
        assert format(SQRT5, ".17g") in out


class TestExitCodes:
    def test_domain_error_is_exit_1_with_json(self, capsys):
        code, out = invoke(capsys, "height", "--family", "dual-polygonal",
                           "--n", "3", "--m", "9", "--method", "closed")
        assert code == 1
        doc = json.loads(out)
        assert doc["error"]["type"] == "InvalidParameterError"

    def test_missing_n_is_exit_1(self, capsys):
        code, out = invoke(capsys, "gen", "--family", "dual-polygonal")
        assert code == 1
        assert "error" in json.loads(out)

    def test_unknown_flag_is_exit_2(self, capsys):
        code, _ = invoke(capsys, "profile", "--family", "dual-icosahedral",
                         "--method", "lp", "--bogus")
        assert code == 2

    def test_unknown_suite_is_exit_2(self, capsys):
        code, _ = invoke(capsys, "verify", "--suite", "nope")
        assert code == 2

    def test_unknown_family_is_exit_2(self, capsys):
        code, _ = invoke(capsys, "gen", "--family", "octahedral")
        assert code == 2
