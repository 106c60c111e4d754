import io
import json

import pytest

from opertools.cli import encode, main, normalize, run, JobError


def run_json(job):
    report, status = run(job)
    return json.loads(json.dumps(encode(report))), status


def test_lax_job_example():
    rep, status = run_json({"command": "lax", "corner": "q", "q": 2, "twist": [1, 3], "momenta": [1, 1]})
    assert status == 0
    assert rep["results"]["matrix"] == [[1.25, -0.25], [0.75, 0.25]]
    assert rep["results"]["hamiltonians"] == [1.5, 0.5]
    assert rep["metadata"]["qq_orientation"]["name"] == "swapped"


def test_lax_job_exact():
    rep, status = run_json({"command": "lax", "corner": "q", "q": 2, "twist": [1, 3], "momenta": [1, 1],
                            "exact": True})
    assert rep["results"]["matrix"] == [["5/4", "-1/4"], ["3/4", "1/4"]]
    assert rep["results"]["spectral_residual"] == 0


def test_solve_job_example():
    rep, status = run_json({"command": "solve", "corner": "q", "q": 2, "twist": [1, 3], "lambda_roots": [1, 2]})
    assert status == 0
    sols = sorted(s["momenta"] for s in rep["results"]["solutions"])
    assert sols == [[0.4, 10.0], [2.0, 2.0]]
    assert all(s["residual"] < 1e-10 for s in rep["results"]["solutions"])


def test_solve_with_lambda_coeffs():
    rep, status = run_json({"command": "solve", "corner": "eps", "eps": 1, "twist": [1, 3],
                            "lambda_coeffs": [2, -3, 1], "exact": True})
    assert status == 0
    assert sorted(s["momenta"] for s in rep["results"]["solutions"]) == [[0, 4], [2, 2]]


def test_rankone_perturbed_point_fails():
    job = {"command": "verify-rankone", "level": "q", "q": 2, "M": [[1, 0], [0, 3]],
           "T": [[1, 1], [0, 2]], "u": [1, 1], "v": [1, 1]}
    rep, status = run_json(job)
    assert status == 1 and rep["results"]["rank_one_residual"] > 0.1


def test_rankone_constructor_passes():
    rep, status = run_json({"command": "verify-rankone", "level": "rational", "twist": [0, 1, 3],
                            "momenta": [1, 2, -1], "exact": True})
    assert status == 0 and rep["results"]["rank_one_residual"] == 0


def test_verify_qq_and_bethe():
    job = {"command": "verify-qq", "corner": "q", "q": 2, "twist": [1, 3], "momenta": ["2/5", 10], "exact": True}
    rep, status = run_json(job)
    assert status == 0 and rep["results"]["qplus"] == [["-2/5", 1]]
    job["command"] = "verify-bethe"
    rep, status = run_json(job)
    assert status == 0 and rep["results"]["bethe_max"] == 0
    job["momenta"] = [2, 2]
    rep, status = run_json(job)
    assert status == 1 and rep["results"]["flag"] == "degenerate"


def test_sections_input():
    job = {"command": "verify-qq", "corner": "rational", "twist": [0, 1],
           "sections": [[1, 0, 1], [-2, 1]], "exact": True}
    rep, status = run_json(job)
    assert status == 0


def test_mirror_bispectral_limit_jobs():
    assert run({"command": "mirror", "corner": "rational", "twist": [0, 1], "lambda_roots": [1, 2]})[1] == 0
    assert run({"command": "bispectral", "eps": 1, "twist": [0, 1], "momenta": ["3/2", "4/3"]})[1] == 0
    rep, status = run({"command": "limit", "source": "eps", "target": "rCM", "twist": [0, 1, 3],
                       "momenta": [1, -1, 2]})
    assert status == 0 and rep["results"]["order"] > 0.9


@pytest.mark.parametrize("job, field", [
    ({"command": "nope"}, "command"),
    ({"command": "lax", "corner": "q", "twist": [1, 3], "momenta": [1, 1]}, "q"),
    ({"command": "lax", "corner": "q", "q": 2, "twist": [1, 3], "momenta": [1]}, "momenta"),
    ({"command": "solve", "corner": "q", "q": 2, "twist": [1, 3], "lambda_roots": [1, 2], "tol": -1}, "tol"),
    ({"command": "lax", "corner": "zz", "twist": [1], "momenta": [1]}, "corner"),
    ({"command": "mirror", "corner": "eps", "eps": 1, "twist": [1, 3], "lambda_roots": [1, 2]}, "corner"),
    ({"command": "lax", "corner": "q", "q": 2, "twist": [1, 3], "momenta": [1, 1], "output": "csv"}, "output"),
])
def test_invalid_jobs(job, field):
    rep, status = run(job)
    assert status == 2 and rep["field"] == field


def test_degenerate_parameters_status_two():
    rep, status = run({"command": "solve", "corner": "q", "q": 2, "twist": [1, 1], "lambda_roots": [1, 2]})
    assert status == 2 and "degenerate" in rep["error"]


def test_normalize_defaults():
    job = normalize({"command": "lax"})
    assert job["tol"] == 1e-10 and job["seed"] == 0 and job["frames"] == "identity"
    with pytest.raises(JobError):
        normalize({"command": "lax", "starts": 0})


@pytest.mark.parametrize("exact", [True, False])
def test_report_roundtrip(exact):
    job = {"command": "solve", "corner": "rational", "twist": [0, 1, 3], "lambda_roots": [1, 2, -1],
           "exact": exact}
    first, _ = run_json(job)
    second, _ = run_json(first["job"])
    assert second["results"] == first["results"]


def test_main_flags_and_job_file(tmp_path, capsys):
    status = main(["lax", "--corner", "q", "--q", "2", "--twist", "[1,3]", "--momenta", "[1,1]"])
    out = json.loads(capsys.readouterr().out)
    assert status == 0 and out["results"]["hamiltonians"] == [1.5, 0.5]
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "lax", "corner": "q", "q": 2, "twist": [1, 3], "momenta": [2, 2]}))
    # the job file wins over flags
    status = main(["--job", str(job), "--momenta", "[1,1]"])
    out = json.loads(capsys.readouterr().out)
    assert out["job"]["momenta"] == [2, 2]


def test_main_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO('{"command": "lax", "corner": "rational", '
                                                 '"twist": [0, 1], "momenta": [0, 0]}'))
    assert main(["--job", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["results"]["matrix"] == [[1.0, 1.0], [-1.0, -1.0]]


def test_main_bad_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["--job", str(bad)]) == 2


def test_main_csv_and_out(tmp_path):
    out = tmp_path / "sols.csv"
    status = main(["solve", "--corner", "q", "--q", "2", "--twist", "[1,3]", "--lambda-roots", "[1,2]",
                   "--exact", "--output", "csv", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert status == 0 and lines[0].startswith("index,p1_re") and len(lines) == 3
    assert not [p for p in tmp_path.iterdir() if p.name.endswith(".tmp")]
