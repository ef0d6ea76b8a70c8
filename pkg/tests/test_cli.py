import json

import pytest

from sphdesign.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_hexagon(capsys):
    code, out, _ = run(capsys, "verify", "--catalog", "hexagon")
    assert code == 0
    assert "strength = 5" in out
    assert "tight" in out


def test_certify_exit_codes(capsys):
    code, out, _ = run(capsys, "certify", "--catalog", "hexagon")
    assert code == 0 and "Found" in out
    code, out, _ = run(capsys, "certify", "--catalog", "icosahedron")
    assert code == 1 and "NonIntegralClassSizes" in out and "16/3" in out
    code, out, _ = run(capsys, "certify", "--catalog", "e8_min")
    assert code == 1 and "SevenDesignObstruction" in out


def test_certify_unknown_without_grid(capsys):
    code, out, _ = run(capsys, "certify", "--catalog", "mub16")
    assert code == 2
    assert "Unknown" in out


def test_usage_error_exit_3(capsys):
    assert main(["verify"]) == 3  # neither --catalog nor --config
    assert main(["nonsense"]) == 3


def test_missing_file_exit_3(capsys):
    assert main(["verify", "--config", "/nonexistent.cfg"]) == 3


def test_json_output(capsys):
    code, out, _ = run(capsys, "--json", "verify", "--catalog", "e8_min")
    assert code == 0
    doc = json.loads(out)
    assert doc["strength"] == 7
    assert doc["tight"] is True
    assert doc["packing_half"]["levenstein"] == "1/2"
    assert doc["verdict"] == "ok"


def test_json_certify_refuted(capsys):
    code, out, _ = run(capsys, "--json", "certify", "--catalog", "icosahedron")
    assert code == 1
    doc = json.loads(out)
    assert doc["refutation"]["kind"] == "NonIntegralClassSizes"
    assert doc["refutation"]["detail"]["n0"] == "16/3"


def test_determinism(capsys):
    code1, out1, _ = run(capsys, "verify", "--catalog", "d4_min")
    code2, out2, _ = run(capsys, "verify", "--catalog", "d4_min")
    assert code1 == code2 == 0
    assert out1 == out2


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    for name in ("hexagon", "e8_min", "mub16"):
        assert name in out


def test_catalog_emit_and_verify(tmp_path, capsys):
    path = tmp_path / "d4.cfg"
    code, _, _ = run(capsys, "catalog", "d4_min", "--out", str(path))
    assert code == 0 and path.exists()
    code, out, _ = run(capsys, "verify", "--config", str(path))
    assert code == 0 and "strength = 5" in out


def test_certify_with_alpha_file(tmp_path, capsys):
    cert_path = tmp_path / "alpha.cert"
    cert_path.write_text("alpha dim=4 scale=config\n2\n0\n0\n0\n")
    code, out, _ = run(
        capsys, "certify", "--catalog", "d4_min", "--alpha-file", str(cert_path)
    )
    assert code == 0 and "Found" in out and "file" in out


def test_certify_bad_alpha_file(tmp_path, capsys):
    cert_path = tmp_path / "alpha.cert"
    cert_path.write_text("alpha dim=4 scale=config\n1\n0\n0\n0\n")
    code, _, _ = run(
        capsys, "certify", "--catalog", "d4_min", "--alpha-file", str(cert_path)
    )
    assert code == 3


def test_derive_writes_levels(tmp_path, capsys):
    out_dir = tmp_path / "fam"
    code, out, _ = run(
        capsys, "derive", "--catalog", "e6_min", "--out", str(out_dir)
    )
    assert code == 0
    manifest = json.loads((out_dir / "family.json").read_text())
    assert len(manifest["levels"]) == 3
    sizes = sorted(e["size"] for e in manifest["levels"])
    assert sizes == [16, 16, 40]


def test_structure_srg_family(capsys):
    code, out, _ = run(capsys, "structure", "--srg-family", "5")
    assert code == 0 and "(100, 22, 0, 6)" in out


def test_dims_output(capsys):
    code, out, _ = run(capsys, "dims", "--max-m", "14")
    assert code == 0
    for piece in ("d = 47", "d = 119", "d = 527"):
        assert piece in out


def test_density_output(capsys):
    code, out, _ = run(capsys, "density", "--max-x", "10000")
    assert code == 0 and "f(10000) = 931" in out


def test_valency_params_mode(capsys):
    code, out, _ = run(capsys, "certify", "--levenstein-params", "16", "144")
    assert code == 1 and "ValencyNonIntegral" in out
    code, out, _ = run(capsys, "certify", "--levenstein-params", "6", "36")
    assert code == 0 and "caveat" in out


def test_manifest_written(tmp_path, capsys):
    path = tmp_path / "run.json"
    code, _, _ = run(
        capsys, "--manifest", str(path), "certify", "--catalog", "d4_min"
    )
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["verdict"] == "ok"
    assert doc["inputs"] == {"catalog": "d4_min"}
    assert "wall_time_s" in doc
    assert doc["witnesses"]["certificate"]["n1"] == 12
