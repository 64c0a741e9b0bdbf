import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from solitonforge import io
from solitonforge.algebra import from_brackets
from solitonforge.catalog import catalog, catalog_algebra, catalog_names
from solitonforge.cli import cli
from solitonforge.curvature import ricci
from solitonforge.extension import einstein_ambient_pipeline

FIXTURE_DIR = Path(__file__).parent / "fixtures"


def test_save_load_roundtrip(tmp_path, heis3):
    path = tmp_path / "h3.json"
    io.save(heis3, path)
    back = io.load(path)
    assert back.name == heis3.name
    assert back.dim == heis3.dim
    assert np.array_equal(back.c, heis3.c)  # bitwise on structure constants
    assert np.array_equal(back.gram, heis3.gram)


def test_save_load_roundtrip_with_gram_and_labels(tmp_path):
    alg = from_brackets("labelled", 2, {(1, 2): {2: 0.1}},
                        gram=np.array([[2.0, 0.25], [0.25, 1.0]]), labels=["x", "y"])
    path = tmp_path / "l.json"
    io.save(alg, path)
    back = io.load(path)
    assert np.array_equal(back.c, alg.c)
    assert np.array_equal(back.gram, alg.gram)
    assert back.basis_labels == ("x", "y")


def test_roundtrip_ambient_extension(tmp_path, heis3):
    amb = einstein_ambient_pipeline(heis3, 2)
    p1 = tmp_path / "amb.json"
    p2 = tmp_path / "amb2.json"
    io.save(amb.ext, p1)
    io.save(io.load(p1), p2)
    assert p1.read_text() == p2.read_text()


def test_schema_rejects_wrong_index_order(tmp_path):
    doc = {"name": "bad", "dim": 3, "brackets": [{"i": 2, "j": 1, "coeffs": {"3": 1.0}}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(io.SchemaError):
        io.load(path)


@pytest.mark.parametrize(
    "doc",
    [
        {"dim": 2, "brackets": []},
        {"name": "x", "dim": "2", "brackets": []},
        {"name": "x", "dim": 2},
        {"name": "x", "dim": 2, "brackets": [{"i": 1, "j": 2}]},
        {"name": "x", "dim": 2, "brackets": [{"i": 1, "j": 2, "coeffs": {"5": 1.0}}]},
        {"name": "x", "dim": 2, "brackets": [], "gram": [[1.0, 0.0]]},
        {"name": "x", "dim": 2, "brackets": [], "extra": 1},
    ],
)
def test_schema_violations(tmp_path, doc):
    path = tmp_path / "doc.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(io.SchemaError):
        io.load(path)


def test_load_invalid_algebra_reports(tmp_path):
    # broken Jacobi: parses, fails validation
    doc = {"name": "bad", "dim": 3,
           "brackets": [{"i": 1, "j": 2, "coeffs": {"3": 1.0}},
                        {"i": 1, "j": 3, "coeffs": {"2": 1.0}},
                        {"i": 2, "j": 3, "coeffs": {"3": 1.0}}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(io.AlgebraValidationError) as err:
        io.load(path)
    assert err.value.report.jacobi_residual > 1e-2


def test_float_formatting_roundtrips():
    values = [1.0, 0.1, -3.0 / 7.0, np.sqrt(2.0), 1e-300, 9.0 / 28.0]
    text = io.dumps_canonical(values)
    assert json.loads(text) == values


def test_catalog_contents():
    names = catalog_names()
    for expected in ["abelian_1", "abelian_4", "heisenberg3", "heisenberg5", "solv2",
                     "einstein_ext_heis3", "wpe_ext_heis3_m1", "wpe_ext_heis3_m2",
                     "ambient_heis3_m2", "hyperbolic_2", "hyperbolic_3", "hyperbolic_4"]:
        assert expected in names
    for alg in catalog():
        from solitonforge.algebra import validate

        assert validate(alg).valid, alg.name


def test_catalog_heisenberg5_bracket():
    alg = catalog_algebra("heisenberg5")
    assert alg.c[0, 1, 4] == 1.0
    assert alg.c[2, 3, 4] == 1.0


def test_catalog_ambient_is_einstein():
    alg = catalog_algebra("ambient_heis3_m2")
    rep = ricci(alg)
    target = -1.5 * np.eye(6)
    assert np.linalg.norm(rep.ricci_tensor - target) / np.linalg.norm(target) <= 1e-9


def test_catalog_frozen_fixtures_regression(tmp_path):
    """Regenerated catalog files must match the committed fixtures byte for byte."""
    assert FIXTURE_DIR.is_dir(), "committed fixtures are missing"
    for alg in catalog():
        committed = FIXTURE_DIR / f"{alg.name}.json"
        assert committed.exists(), f"missing committed fixture for {alg.name}"
        regenerated = tmp_path / f"{alg.name}.json"
        io.save(alg, regenerated)
        assert regenerated.read_text() == committed.read_text(), alg.name


# ---------------------------------------------------------------------------
# CLI


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def h3_file(tmp_path, heis3):
    path = tmp_path / "heisenberg3.json"
    io.save(heis3, path)
    return str(path)


def test_cli_validate_ok(runner, h3_file):
    result = runner.invoke(cli, ["validate", h3_file])
    assert result.exit_code == 0
    assert "valid" in result.output


def test_cli_validate_schema_error(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"name": "x", "dim": 2, "brackets": [{"i": 2, "j": 1, "coeffs": {"2": 1}}]}')
    result = runner.invoke(cli, ["validate", str(path)])
    assert result.exit_code == 2


def test_cli_validate_math_failure(runner, tmp_path):
    doc = {"name": "bad", "dim": 3,
           "brackets": [{"i": 1, "j": 2, "coeffs": {"3": 1.0}},
                        {"i": 1, "j": 3, "coeffs": {"2": 1.0}},
                        {"i": 2, "j": 3, "coeffs": {"3": 1.0}}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    result = runner.invoke(cli, ["validate", str(path)])
    assert result.exit_code == 1


def test_cli_curvature(runner, h3_file):
    result = runner.invoke(cli, ["curvature", h3_file])
    assert result.exit_code == 0
    assert "scalar curvature: -0.5" in result.output


def test_cli_soliton_accepts(runner, h3_file):
    result = runner.invoke(cli, ["soliton", h3_file])
    assert result.exit_code == 0
    assert "lambda = -1.5" in result.output
    assert "kind: algebraic" in result.output


def test_cli_soliton_semi_flag(runner, h3_file):
    result = runner.invoke(cli, ["soliton", h3_file, "--semi-algebraic"])
    assert result.exit_code == 0


def test_cli_extend_and_verify_pipeline(runner, h3_file, tmp_path):
    out = str(tmp_path / "amb.json")
    result = runner.invoke(cli, ["extend", h3_file, "--mode", "ambient", "--m", "2", "--out", out])
    assert result.exit_code == 0, result.output
    result = runner.invoke(cli, ["verify", out, "--einstein", "-1.5"])
    assert result.exit_code == 0, result.output


def test_cli_verify_einstein_fails_on_non_einstein(runner, h3_file):
    result = runner.invoke(cli, ["verify", h3_file, "--einstein", "-1.5"])
    assert result.exit_code == 1


def test_cli_verify_wpe_and_recover(runner, h3_file, tmp_path):
    out = str(tmp_path / "wpe.json")
    result = runner.invoke(cli, ["extend", h3_file, "--mode", "wpe", "--m", "2", "--out", out])
    assert result.exit_code == 0, result.output
    ell = -1.5 / np.sqrt(7.0)
    result = runner.invoke(cli, [
        "verify", out, "--wpe", "--lambda", "-1.5", "--m", "2", "--L", str(ell), "--xi", "4",
    ])
    assert result.exit_code == 0, result.output
    result = runner.invoke(cli, [
        "verify", out, "--recover", "--lambda", "-1.5", "--m", "2", "--xi", "4",
    ])
    assert result.exit_code == 0, result.output


def test_cli_verify_needs_exactly_one_mode(runner, h3_file):
    result = runner.invoke(cli, ["verify", h3_file])
    assert result.exit_code == 2
    result = runner.invoke(cli, ["verify", h3_file, "--einstein", "-1", "--wpe"])
    assert result.exit_code == 2


def test_cli_check_solv(runner, h3_file, tmp_path):
    out = str(tmp_path / "amb.json")
    runner.invoke(cli, ["extend", h3_file, "--mode", "ambient", "--m", "2", "--out", out])
    result = runner.invoke(cli, [
        "check-solv", out, "--a", "4", "--n", "1,2,3,5,6", "--xi", "4",
        "--lambda", "-1.5", "--m", "2", "--L", "0",
    ])
    assert result.exit_code == 0, result.output


def test_cli_check_solv_bad_indices(runner, h3_file):
    result = runner.invoke(cli, [
        "check-solv", h3_file, "--a", "9", "--n", "1,2", "--xi", "1",
        "--lambda", "-1.5", "--m", "2", "--L", "0",
    ])
    assert result.exit_code == 2


def test_cli_catalog_lists_and_emits(runner, tmp_path):
    result = runner.invoke(cli, ["catalog"])
    assert result.exit_code == 0
    assert "heisenberg3" in result.output
    emit_dir = str(tmp_path / "out")
    result = runner.invoke(cli, ["catalog", "--emit", emit_dir])
    assert result.exit_code == 0
    assert (tmp_path / "out" / "ambient_heis3_m2.json").exists()


def test_cli_json_outputs_deterministic(runner, h3_file, tmp_path):
    j1, j2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    for path in (j1, j2):
        result = runner.invoke(cli, ["soliton", h3_file, "--json", path])
        assert result.exit_code == 0
    assert Path(j1).read_bytes() == Path(j2).read_bytes()
    payload = json.loads(Path(j1).read_text())
    assert payload["result"]["lambda"] == pytest.approx(-1.5)
    assert "sha256" in payload["provenance"]["input"]


def test_cli_tolerance_env_override(runner, h3_file, monkeypatch):
    # an absurdly tight tolerance makes the (machine-precision) fit fail
    monkeypatch.setenv("SOLITONFORGE_TOLERANCE", "1e-17")
    result = runner.invoke(cli, ["soliton", h3_file])
    assert result.exit_code == 1
    monkeypatch.setenv("SOLITONFORGE_TOLERANCE", "1e-6")
    result = runner.invoke(cli, ["soliton", h3_file])
    assert result.exit_code == 0


def test_cli_tolerance_flag_beats_env(runner, h3_file, monkeypatch):
    monkeypatch.setenv("SOLITONFORGE_TOLERANCE", "1e-17")
    result = runner.invoke(cli, ["--tol-fit", "1e-8", "soliton", h3_file])
    assert result.exit_code == 0


def test_cli_extend_flat_override(runner, tmp_path):
    base = from_brackets("abelian_2", 2, {})
    base_path = tmp_path / "ab2.json"
    io.save(base, base_path)
    der_path = tmp_path / "der.json"
    der_path.write_text(json.dumps({"matrix": [[1.0, 0.0], [0.0, 1.0]]}))
    result = runner.invoke(cli, [
        "extend", str(base_path), "--mode", "einstein",
        "--lambda", "-1", "--derivation", str(der_path),
    ])
    assert result.exit_code == 0, result.output


def test_cli_extend_rejects_flat_without_override(runner, tmp_path):
    base = from_brackets("abelian_2", 2, {})
    base_path = tmp_path / "ab2.json"
    io.save(base, base_path)
    result = runner.invoke(cli, ["extend", str(base_path), "--mode", "einstein"])
    assert result.exit_code == 1


def test_cli_extend_ambient_requires_integer_m(runner, h3_file):
    result = runner.invoke(cli, ["extend", h3_file, "--mode", "ambient", "--m", "2.5"])
    assert result.exit_code == 2
