"""End-to-end CLI runs compared with golden JSON in tests/golden.

Set CENTERKIT_REGEN_GOLDEN=1 to rewrite the golden files after a reviewed change.
"""

import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from centerkit.cli import (EXIT_BUDGET, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, SchemaError,
                           dispatch, load_system, system_from_json)
from centerkit.reference import fixture_path

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"
VOLATILE = {"seconds", "elapsed"}


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch([str(a) for a in argv], out, err)
    return code, json.loads(out.getvalue()), err.getvalue()


def scrub(obj):
    if isinstance(obj, dict):
        return {k: scrub(v) for k, v in obj.items() if k not in VOLATILE}
    if isinstance(obj, list):
        return [scrub(v) for v in obj]
    if isinstance(obj, float):
        return round(obj, 6)
    return obj


def check_golden(name, obj):
    path = GOLDEN / f"{name}.json"
    obj = scrub(obj)
    if os.environ.get("CENTERKIT_REGEN_GOLDEN"):
        path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    assert obj == json.loads(path.read_text())


CASES = {
    "lyapunov_family": ["lyapunov", "--count", 5],
    "lyapunov_reduced": ["lyapunov", "--count", 7, "--reduce"],
    "lyapunov_file": ["lyapunov", "--system", fixture_path("linear.json"), "--count", 3],
    "center_focus": ["center-check", "--at", "a0=1"],
    "center_unique": ["center-check", "--at", "a3=-1,a5=-1"],
    "center_extra": ["center-check", "--at", "a5=1"],
    "global_theorem": ["global-center", "--at", "a3=-1,a5=-1"],
    "global_pipeline": ["global-center", "--at", "a3=-1,a5=-1", "--mode", "pipeline"],
    "compactify_u1": ["compactify", "--chart", "U1"],
    "compactify_c3": ["compactify", "--system", DATA / "c3.json"],
    "classify_origin": ["classify", "--system", DATA / "c3.json"],
    "classify_infinity": ["classify", "--at", "a3=-1,a5=-1", "--chart", "U2", "--resolve",
                          "--marks", '{"infinity": "y"}'],
    "ideal_gb": ["ideal", "gb", "--gens", DATA / "cusp_gens.json"],
    "ideal_gb_lex": ["ideal", "gb", "--gens", DATA / "cusp_gens.json", "--order", "lex"],
    "ideal_member": ["ideal", "member", "--gens", DATA / "cusp_gens.json", "--poly", "x^2*y + y^4"],
    "ideal_radical": ["ideal", "radical", "--gens", DATA / "cusp_gens.json", "--poly", "x + y"],
    "ideal_intersect": ["ideal", "intersect", "--gens", DATA / "line_x.json",
                        "--gens2", DATA / "line_y.json"],
    "portrait_inline": ["portrait", "--system", fixture_path("linear.json"), "--seeds", "1,0",
                        "--forward-only"],
    "reproduce_list": ["reproduce", "--list"],
    "reproduce_l3": ["reproduce", "--target", "L3"],
    "reproduce_t3_skipped": ["reproduce", "--target", "T3-literal"],
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, out, _ = run(CASES[name])
    assert code == EXIT_OK
    check_golden(name, out)


def test_portrait_to_file(tmp_path):
    target = tmp_path / "c3.svg"
    code, out, _ = run(["portrait", "--at", "a3=-1,a5=-1", "--seeds", "1,0;5,0", "--out", target])
    assert code == EXIT_OK
    assert target.read_text().startswith("<?xml") and "svg" not in out
    assert [runs[0]["verdict"] for runs in out["orbits"]] == ["closed", "closed"]


@pytest.mark.parametrize("argv,code,kind", [
    ([], EXIT_USAGE, "usage"),
    (["frobnicate"], EXIT_USAGE, "usage"),
    (["center-check"], EXIT_USAGE, "usage"),
    (["reproduce"], EXIT_USAGE, "usage"),
    (["reproduce", "--target", "nope"], EXIT_USAGE, "usage"),
    (["ideal", "member", "--gens", DATA / "cusp_gens.json"], EXIT_USAGE, "usage"),
    (["ideal", "intersect", "--gens", DATA / "line_x.json"], EXIT_USAGE, "usage"),
    (["portrait", "--seeds", "1"], EXIT_USAGE, "usage"),
    (["classify", "--point", "1,2,3"], EXIT_USAGE, "usage"),
    (["lyapunov", "--system", DATA / "bad_exponent.json"], EXIT_COMPUTE, "schema"),
    (["lyapunov", "--system", DATA / "bad_field.json"], EXIT_COMPUTE, "schema"),
    (["lyapunov", "--system", DATA / "bad_param.json"], EXIT_COMPUTE, "schema"),
    (["lyapunov", "--system", DATA / "missing.json"], EXIT_COMPUTE, "schema"),
    (["ideal", "gb", "--gens", DATA / "bad_gens.json"], EXIT_COMPUTE, "schema"),
    (["center-check", "--at", "a9=1"], EXIT_COMPUTE, "GlobalCenterError"),
    (["classify", "--point", "1,1"], EXIT_COMPUTE, "DesingError"),
    (["lyapunov", "--at", "a0=1", "--system", fixture_path("quintic.json"), "--count", 0],
     EXIT_COMPUTE, "LyapunovError"),
])
def test_error_paths(argv, code, kind):
    got, out, _ = run(argv)
    assert got == code
    assert out["error"] == kind


def test_schema_error_path():
    _, out, _ = run(["lyapunov", "--system", DATA / "bad_exponent.json"])
    assert out["path"] == "$.P"
    _, out, _ = run(["lyapunov", "--system", DATA / "bad_param.json"])
    assert out["path"] == "$.params.a3"


def test_budget_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gb_steps": 2}))
    gens = tmp_path / "gens.json"
    # cyclic-4 in x, y, a0, a1
    gens.write_text(json.dumps(["x + y + a0 + a1", "x*y + y*a0 + a0*a1 + a1*x",
                                "x*y*a0 + y*a0*a1 + a0*a1*x + a1*x*y", "x*y*a0*a1 - 1"]))
    code, out, _ = run(["--config", cfg, "ideal", "gb", "--gens", gens])
    assert code == EXIT_BUDGET and out["error"] == "budget"


def test_portrait_budget_exit_code():
    code, out, _ = run(["portrait", "--at", "a3=-1,a5=-1", "--seeds", "5,0", "--max-steps", 3])
    assert code == EXIT_BUDGET
    assert out["orbits"][0][0]["verdict"] == "budget"


def test_reproduce_failure_exit_code():
    code, out, _ = run(["reproduce", "--target", "radical-T1"])
    assert code == EXIT_COMPUTE and out["ok"] is False


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gb_steps": "many"}))
    code, out, _ = run(["--config", cfg, "center-check", "--at", "a0=1"])
    assert code == EXIT_COMPUTE and out["error"] == "ConfigError"


def test_system_files():
    q = load_system(fixture_path("quintic.json"))
    assert q.parameters() == ["a0", "a1", "a2", "a3", "a4", "a5"]
    c3 = load_system(str(DATA / "c3.json"))
    assert c3.parameters() == [] and str(c3.Q) == "-x^5 - x^3*y^2 - x"
    with pytest.raises(SchemaError) as err:
        system_from_json({"P": "y", "Q": "-x + z"})
    assert err.value.path == "$.Q"
    with pytest.raises(SchemaError):
        system_from_json({"P": "y", "Q": "-x", "metadata": {"family": "quintic"}})


def test_system_files_match_json_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads(Path(fixture_path("system.schema.json")).read_text())
    for path in (fixture_path("quintic.json"), fixture_path("linear.json"), DATA / "c3.json"):
        jsonschema.validate(json.loads(Path(path).read_text()), schema)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "centerkit.cli", "center-check", "--at", "a0=1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["verdict"] == "focus"
    proc = subprocess.run([sys.executable, "-m", "centerkit.cli"], capture_output=True, text=True,
                          check=False)
    assert proc.returncode == EXIT_USAGE and "usage" in proc.stderr
