"""Command-line interface: flags, artifacts, exit codes."""
import json
import subprocess
import sys

import pytest

from boxsuite.cli import main
from boxsuite.model import BoxSet, CandidateBox, Carton, Dims3, Shipment, save_boxes, save_shipments


@pytest.fixture
def fixture_files(tmp_path):
    boxes = BoxSet([
        CandidateBox(id=1, inner=Dims3(2, 2, 2)),
        CandidateBox(id=2, inner=Dims3(3, 2, 2)),
        CandidateBox(id=3, inner=Dims3(4, 3, 2)),
        CandidateBox(id=4, inner=Dims3(6, 4, 3)),
    ])
    shipments = [
        Shipment(id=10, cartons=(Carton(Dims3(2, 2, 2)),)),
        Shipment(id=11, cartons=(Carton(Dims3(3, 2, 1)), Carton(Dims3(3, 2, 1)))),
        Shipment(id=12, cartons=(Carton(Dims3(4, 3, 2)),)),
    ]
    bpath = tmp_path / "boxes.csv"
    spath = tmp_path / "shipments.csv"
    save_boxes(boxes, bpath)
    save_shipments(shipments, spath)
    return tmp_path, str(bpath), str(spath)


def run_fit(files):
    tmp, bpath, spath = files
    out = tmp / "fit.csv"
    rc = main(["fit", "--boxes", bpath, "--shipments", spath,
               "--out", str(out), "--threads", "1"])
    assert rc == 0
    return out


class TestFit:
    def test_writes_expected_bits_and_manifest(self, fixture_files):
        out = run_fit(fixture_files)
        rows = {tuple(line.split(",")) for line in
                out.read_text().strip().splitlines()[1:]}
        assert rows == {("10", "1"), ("10", "2"), ("10", "3"), ("10", "4"),
                        ("11", "2"), ("11", "3"), ("11", "4"),
                        ("12", "3"), ("12", "4")}
        manifest = json.loads((out.parent / "fit.manifest.json").read_text())
        assert manifest["set_bits"] == 9
        assert manifest["timeouts"] == []

    def test_forced_timeout_recorded_with_bit_clear(self, tmp_path):
        # exceeds a 1 ms budget in the branch-and-bound but passes prescreens
        dims = [(3, 4, 4), (3, 1, 6), (5, 1, 5), (5, 2, 4), (4, 1, 6), (5, 2, 1)]
        boxes = BoxSet([CandidateBox(id=1, inner=Dims3(9, 5, 4))])
        shipments = [Shipment(id=1, cartons=tuple(Carton(Dims3(*d)) for d in dims))]
        bpath, spath = tmp_path / "b.csv", tmp_path / "s.csv"
        save_boxes(boxes, bpath)
        save_shipments(shipments, spath)
        out = tmp_path / "fit.csv"
        rc = main(["fit", "--boxes", str(bpath), "--shipments", str(spath),
                   "--out", str(out), "--time-limit-ms", "1"])
        assert rc == 0
        assert out.read_text().strip().splitlines()[1:] == []
        manifest = json.loads((tmp_path / "fit.manifest.json").read_text())
        assert manifest["timeouts"] == [[1, 1]]

    def test_missing_file_exits_2(self, tmp_path):
        rc = main(["fit", "--boxes", str(tmp_path / "nope.csv"),
                   "--shipments", str(tmp_path / "nope2.csv"),
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 2


class TestRecommend:
    def run(self, files, *extra):
        tmp, bpath, spath = files
        fit = run_fit(files)
        out_dir = tmp / "run"
        rc = main(["recommend", "--fit", str(fit), "--boxes", bpath,
                   "--shipments", spath, "-p", "2",
                   "--out", str(out_dir), *extra])
        return rc, out_dir

    def test_exact_and_grasp_agree(self, fixture_files):
        rc, out_dir = self.run(fixture_files, "--method", "exact")
        assert rc == 0
        exact = json.loads((out_dir / "suite.json").read_text())
        rc, out_dir = self.run(fixture_files, "--method", "grasp")
        assert rc == 0
        grasp = json.loads((out_dir / "suite.json").read_text())
        assert [e["id"] for e in exact["suite"]] == [e["id"] for e in grasp["suite"]]
        assert exact["objective"] == grasp["objective"]

    def test_lock_at_least_p_exits_2(self, fixture_files):
        rc, _ = self.run(fixture_files, "--lock", "1,2")
        assert rc == 2

    def test_locked_box_appears(self, fixture_files):
        rc, out_dir = self.run(fixture_files, "--lock", "1", "--method", "exact")
        assert rc == 0
        payload = json.loads((out_dir / "suite.json").read_text())
        assert 1 in [e["id"] for e in payload["suite"]]

    def test_lagrangian_reports_bounds(self, fixture_files):
        rc, out_dir = self.run(fixture_files, "--method", "lagrangian")
        assert rc == 0
        text = (out_dir / "report.txt").read_text()
        assert "lower bound" in text
        assert "optimality gap" in text

    def test_infeasible_still_exits_0(self, tmp_path, capsys):
        boxes = BoxSet([CandidateBox(id=1, inner=Dims3(10, 1, 1)),
                        CandidateBox(id=2, inner=Dims3(3, 3, 3))])
        shipments = [Shipment(id=20, cartons=(Carton(Dims3(10, 1, 1)),)),
                     Shipment(id=21, cartons=(Carton(Dims3(3, 3, 3)),))]
        bpath, spath = tmp_path / "b.csv", tmp_path / "s.csv"
        save_boxes(boxes, bpath)
        save_shipments(shipments, spath)
        fit = tmp_path / "fit.csv"
        assert main(["fit", "--boxes", str(bpath), "--shipments", str(spath),
                     "--out", str(fit)]) == 0
        rc = main(["recommend", "--fit", str(fit), "--boxes", str(bpath),
                   "--shipments", str(spath), "-p", "1",
                   "--out", str(tmp_path / "run")])
        assert rc == 0
        assert "There is no feasible solution" in capsys.readouterr().out
        payload = json.loads((tmp_path / "run" / "suite.json").read_text())
        assert payload["feasible"] is False
        assert payload["suite"] == []


class TestOtherCommands:
    @pytest.fixture
    def recommended(self, fixture_files):
        tmp, bpath, spath = fixture_files
        fit = run_fit(fixture_files)
        out_dir = tmp / "run"
        assert main(["recommend", "--fit", str(fit), "--boxes", bpath,
                     "--shipments", spath, "-p", "2", "--method", "exact",
                     "--out", str(out_dir)]) == 0
        return fixture_files, out_dir / "suite.json"

    def test_validate_identical_sets(self, recommended, capsys):
        (tmp, bpath, spath), suite = recommended
        rc = main(["validate", "--suite", str(suite), "--boxes", bpath,
                   "--shipments-a", spath, "--shipments-b", spath,
                   "--out", str(tmp / "val")])
        assert rc == 0
        assert "no metric divergence" in capsys.readouterr().out
        assert (tmp / "val" / "validation.csv").exists()

    def test_compare_baseline_zero(self, recommended, capsys):
        (tmp, bpath, spath), suite = recommended
        rc = main(["compare", "--suite", str(suite), "--suite", str(suite),
                   "--boxes", bpath, "--shipments", spath])
        assert rc == 0
        assert "0.00%" in capsys.readouterr().out

    def test_finetune_emits_locked(self, fixture_files):
        tmp, bpath, spath = fixture_files
        fit = run_fit(fixture_files)
        out_dir = tmp / "run"
        assert main(["recommend", "--fit", str(fit), "--boxes", bpath,
                     "--shipments", spath, "-p", "2", "--method", "exact",
                     "--lock", "1", "--out", str(out_dir)]) == 0
        out = tmp / "tuned.csv"
        rc = main(["finetune", "--suite", str(out_dir / "suite.json"),
                   "--boxes", bpath, "--deltas=-1,0,1", "--out", str(out)])
        assert rc == 0
        rows = [line.split(",") for line in
                out.read_text().strip().splitlines()[1:]]
        assert ["1", "2", "2", "2"] in rows

    def test_fitone_reports_cheapest_box(self, recommended, tmp_path, capsys):
        (tmp, bpath, spath), suite = recommended
        one = tmp_path / "one.csv"
        save_shipments([Shipment(id=99, cartons=(Carton(Dims3(3, 2, 1)),))], one)
        rc = main(["fitone", "--shipment", str(one), "--suite", str(suite)])
        assert rc == 0
        assert "box 2" in capsys.readouterr().out

    def test_fitone_no_fit(self, recommended, tmp_path, capsys):
        (tmp, bpath, spath), suite = recommended
        one = tmp_path / "one.csv"
        save_shipments([Shipment(id=99, cartons=(Carton(Dims3(9, 9, 9)),))], one)
        rc = main(["fitone", "--shipment", str(one), "--suite", str(suite)])
        assert rc == 0
        assert "no suite box fits" in capsys.readouterr().out

    def test_fitone_rejects_multiple_shipments(self, recommended):
        (tmp, bpath, spath), suite = recommended
        rc = main(["fitone", "--shipment", spath, "--suite", str(suite)])
        assert rc == 2


class TestParser:
    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["--badflag"])
        assert exc.value.code == 2

    def test_help_via_subprocess(self):
        proc = subprocess.run(
            [sys.executable, "-m", "boxsuite.cli", "--help"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        for cmd in ("fit", "recommend", "validate", "compare", "finetune",
                    "fitone"):
            assert cmd in proc.stdout
