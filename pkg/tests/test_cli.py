import json

import pytest

from cycle_integrals.cli import main

PAPER = {"f": [0, 0, 1, 1], "g": [0, 1, 3], "cycle": [1, 1, -2],
         "epsilon": None, "seed": 7, "precision_bits": None}


@pytest.fixture
def paper_instance(tmp_path):
    path = tmp_path / "paper.json"
    path.write_text(json.dumps(PAPER))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestBounds:
    def test_table_row(self, capsys):
        code, out = run(capsys, "bounds", "--m", "3", "--n", "4")
        assert code == 0
        data = json.loads(out)
        assert data["result"] == {"tangential": 8, "infinitesimal": 18,
                                  "simple": 3}


class TestReduce:
    def test_example(self, capsys):
        code, out = run(capsys, "reduce", "--f", "[0,0,1]", "--g", "[0,1,1]")
        assert code == 0
        data = json.loads(out)
        assert data["result"]["g_tilde"] == ["0", "1"]
        assert data["result"]["subtracted"] == [{"coefficient": "1", "power": 1}]


class TestInstanceCommands:
    def test_tangential_paper_example(self, capsys, paper_instance):
        code, out = run(capsys, "tangential", "--instance", paper_instance)
        assert code == 0
        data = json.loads(out)
        assert data["result"]["count"] == 0
        assert data["seed"] == 7
        assert "config" in data

    def test_infinitesimal_with_epsilon_flag(self, capsys, paper_instance):
        code, out = run(capsys, "infinitesimal", "--instance", paper_instance,
                        "--epsilon", "1/100")
        assert code == 0
        assert json.loads(out)["result"]["count"] == 2

    def test_strict_schema(self, tmp_path, capsys):
        bad = dict(PAPER)
        bad["cycel"] = [1, -1, 0]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        code, _ = run(capsys, "tangential", "--instance", str(path))
        assert code == 2

    def test_invalid_cycle_rejected(self, tmp_path, capsys):
        bad = dict(PAPER)
        bad["cycle"] = [1, 1, 1]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        code, _ = run(capsys, "tangential", "--instance", str(path))
        assert code == 2


class TestCertify:
    def test_failing_certificate_named(self, capsys):
        code, out = run(capsys, "certify-cycle", "--cycle", "[1,2,-3]", "--n", "3")
        assert code == 0
        data = json.loads(out)
        assert data["result"]["certificate"]["regular_at_infinity"] is False
        assert data["result"]["certificate"]["failing_permutations"]

    def test_regular_certificate(self, capsys):
        code, out = run(capsys, "certify-cycle", "--cycle", "[1,2,-3]", "--n", "4")
        assert code == 0
        data = json.loads(out)
        assert data["result"]["certificate"]["regular_at_infinity"] is True
        assert data["result"]["symmetry_order"] == 1


class TestMonodromyCommand:
    def test_square(self, capsys):
        code, out = run(capsys, "monodromy", "--f", "[0,0,1]")
        assert code == 0
        data = json.loads(out)
        assert data["result"]["loops"][0]["permutation"] == [2, 1]
        assert data["result"]["infinity_permutation"] == [2, 1]


class TestBrieskornCommand:
    def test_dimension_only(self, capsys):
        code, out = run(capsys, "brieskorn", "--m", "3", "--n", "4")
        assert code == 0
        assert json.loads(out)["result"]["dimension"] == 3

    def test_generators(self, capsys):
        code, out = run(capsys, "brieskorn", "--f", "[0,0,1,1]", "--n", "4")
        assert code == 0
        data = json.loads(out)
        assert data["result"]["generator_degrees"] == [1, 2, 4]


class TestPlotData:
    def test_round_trip_counts(self, capsys, paper_instance, tmp_path):
        report_path = str(tmp_path / "report.json")
        code, _ = run(capsys, "infinitesimal", "--instance", paper_instance,
                      "--epsilon", "1/100", "--output", report_path)
        assert code == 0
        code, out = run(capsys, "plot-data", "--report", report_path)
        assert code == 0
        lines = [line for line in out.strip().splitlines() if line]
        assert lines[0] == "re_t,im_t,multiplicity,class"
        regular = [line for line in lines[1:] if line.endswith(",regular")]
        report = json.load(open(report_path))
        assert len(regular) == report["result"]["count"]

    def test_alien_polylines(self, capsys, paper_instance, tmp_path):
        report_path = str(tmp_path / "alien.json")
        code, _ = run(capsys, "alien", "--instance", paper_instance,
                      "--schedule", "1/50,1/100,1/200",
                      "--output", report_path)
        assert code == 0
        code, out = run(capsys, "plot-data", "--report", report_path)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "branch,epsilon,re_t,im_t,class"
        assert all(line.endswith(",alien") for line in lines[1:])
        assert len(lines) - 1 == 2 * 3  # two branches, three schedule points

    def test_empty_report(self, capsys, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text(json.dumps({
            "command": "tangential",
            "result": {"count": 0, "distinct_regular_zeros": [],
                       "excluded_near_critical": []}}))
        code, out = run(capsys, "plot-data", "--report", str(path))
        assert code == 0
        assert out.strip() == "re_t,im_t,multiplicity,class"

    def test_malformed_report(self, capsys, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("[1, 2]")
        code, _ = run(capsys, "plot-data", "--report", str(path))
        assert code == 2


class TestDeterminism:
    def test_bit_identical_reports(self, capsys, paper_instance, tmp_path):
        a = str(tmp_path / "a.json")
        b = str(tmp_path / "b.json")
        run(capsys, "infinitesimal", "--instance", paper_instance,
            "--epsilon", "1/100", "--output", a)
        run(capsys, "infinitesimal", "--instance", paper_instance,
            "--epsilon", "1/100", "--output", b)
        assert open(a, "rb").read() == open(b, "rb").read()
