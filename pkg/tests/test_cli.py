"""Command-line interface: exit codes, streams, determinism."""

from pathlib import Path

from cftweave import parse, validate
from cftweave.cli import main

REPO_FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FIG2 = str(REPO_FIXTURES / "example_fig2.alfred")
VEHICLE = str(REPO_FIXTURES / "vehicle.alfred")

VEHICLE_REDUCED = (
    "B.Battery-omission\n"
    "B.Battery-too-low\n"
    "E.Speed-too-low\n"
    "EBC.HW-defect_PartCount\n"
    "EBC.Loss-of-power\n"
    "U1.False-negative ∧ U2.False-negative\n")


def test_validate_ok(capsys):
    assert main(["validate", FIG2]) == 0
    out, err = capsys.readouterr()
    assert "unconnected-in-port" in out
    assert err == ""


def test_validate_reports_errors_with_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.alfred"
    bad.write_text(
        "layer l\n\ncomponent x in l {\n  event e\n}\n\n"
        "component y in l {\n  event e\n}\n\n"
        "alfred x -> y\n\nalfred y -> x\n", encoding="utf-8")
    assert main(["validate", str(bad)]) == 1
    out, _ = capsys.readouterr()
    assert "dependency-cycle" in out


def test_cutsets_reduced_vehicle(capsys):
    assert main(["cutsets", VEHICLE, "--top", "EBC.no-emergency-braking",
                 "--stage", "reduced"]) == 0
    out, _ = capsys.readouterr()
    assert out == VEHICLE_REDUCED


def test_cutsets_pre_tsv(capsys):
    assert main(["cutsets", VEHICLE, "--top", "EBC.no-emergency-braking",
                 "--stage", "pre", "--format", "tsv"]) == 0
    out, _ = capsys.readouterr()
    lines = out.splitlines()
    assert len(lines) == 12
    assert lines[3] == "U1.Battery-omission\tU2.Battery-omission"


def test_synthesize_prefix_text(capsys):
    assert main(["synthesize", FIG2, "--top", "f2.loss-of"]) == 0
    out, _ = capsys.readouterr()
    assert out == ("OR(OR(AND(ext@f1.p1.loss-of,ext@f1.p2.loss-of),"
                   "OR(CPU.a,RAM.b),f1.loss-of),f2.loss-of)\n")


def test_synthesize_dot(capsys):
    assert main(["synthesize", FIG2, "--top", "f2.loss-of", "--dot"]) == 0
    out, _ = capsys.readouterr()
    assert out.startswith("digraph fault_tree {")


def test_weave_writes_model_and_sidecar(tmp_path, capsys):
    target = tmp_path / "woven.alfred"
    assert main(["weave", FIG2, "-o", str(target)]) == 0
    woven_text = target.read_text(encoding="utf-8")
    model = parse(woven_text)
    assert validate(model).ok
    assert model.component("f1").cft.input_fm("from-CPU-loss-of", None) is not None
    sidecar = (tmp_path / "woven.alfred.provenance.tsv").read_text(encoding="utf-8")
    assert sidecar.splitlines()[0] == "injected-node\tprovider\tdependent"
    assert len(sidecar.splitlines()) == 4


def test_weave_to_stdout(capsys):
    assert main(["weave", FIG2]) == 0
    out, _ = capsys.readouterr()
    assert "infm from-RAM-loss-of" in out


def test_weave_provenance_to_custom_path(tmp_path, capsys):
    sidecar = tmp_path / "prov.tsv"
    assert main(["weave", FIG2, "-o", str(tmp_path / "w.alfred"),
                 "--provenance", str(sidecar)]) == 0
    assert sidecar.read_text(encoding="utf-8").count("\n") == 4
    assert not (tmp_path / "w.alfred.provenance.tsv").exists()


def test_cutsets_to_file(tmp_path, capsys):
    target = tmp_path / "report.txt"
    assert main(["cutsets", VEHICLE, "--top", "EBC.no-emergency-braking",
                 "-o", str(target)]) == 0
    assert target.read_text(encoding="utf-8") == VEHICLE_REDUCED


def test_export_dot(capsys):
    assert main(["export-dot", FIG2]) == 0
    out, _ = capsys.readouterr()
    assert out.startswith("digraph model {")
    assert out.count("style=dashed") == 3


def test_missing_file(capsys):
    assert main(["validate", "no-such-file.alfred"]) == 1
    _, err = capsys.readouterr()
    assert "error:" in err


def test_parse_error_is_located(tmp_path, capsys):
    bad = tmp_path / "garbage.alfred"
    bad.write_text("what is this\n", encoding="utf-8")
    assert main(["validate", str(bad)]) == 1
    _, err = capsys.readouterr()
    assert "1:1" in err


def test_usage_error_missing_arguments(capsys):
    assert main(["cutsets"]) == 2


def test_usage_error_bad_top(capsys):
    assert main(["cutsets", VEHICLE, "--top", "nodot"]) == 2
    _, err = capsys.readouterr()
    assert "top event" in err


def test_unknown_top_is_analysis_error(capsys):
    assert main(["cutsets", VEHICLE, "--top", "EBC.nope"]) == 1
    _, err = capsys.readouterr()
    assert "unknown top event" in err


def test_invalid_model_blocks_pipeline(tmp_path, capsys):
    bad = tmp_path / "cycle.alfred"
    bad.write_text(
        "layer l\n\ncomponent x in l {\n  event e\n  outfm f = e\n}\n\n"
        "alfred x -> x\n", encoding="utf-8")
    assert main(["cutsets", str(bad), "--top", "x.f"]) == 1
    _, err = capsys.readouterr()
    assert "self-dependency" in err


def test_byte_determinism(capsys):
    main(["cutsets", VEHICLE, "--top", "EBC.no-emergency-braking", "--stage", "pre"])
    first, _ = capsys.readouterr()
    main(["cutsets", VEHICLE, "--top", "EBC.no-emergency-braking", "--stage", "pre"])
    second, _ = capsys.readouterr()
    assert first == second
