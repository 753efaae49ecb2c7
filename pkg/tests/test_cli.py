import json
import subprocess
import sys

import numpy as np
import pytest

from logconcave import Gaussian, GridSpec, integrate, read_grid, sample, write_grid
from logconcave.cli import main


@pytest.fixture
def gauss_file(tmp_path):
    path = tmp_path / "g.grid"
    write_grid(sample(Gaussian(0.0, 1.0), GridSpec.centered([8.0], [257])), path)
    return path


def test_polar_of_gaussian(gauss_file, tmp_path):
    out = tmp_path / "p.grid"
    assert main(["transform", str(gauss_file), "-o", str(out), "--op", "polar"]) == 0
    f, g = read_grid(gauss_file), read_grid(out)
    assert integrate(f) * integrate(g) == pytest.approx(2 * np.pi, rel=0.01)


def test_conjugate_writes_convex_file(gauss_file, tmp_path):
    out = tmp_path / "c.grid"
    assert main(["transform", str(gauss_file), "-o", str(out), "--op", "conjugate", "--z", "0.5"]) == 0
    assert out.read_text().startswith("kind: convex-extended")


def test_steiner_and_homothety_and_asplund(gauss_file, tmp_path):
    s = tmp_path / "s.grid"
    assert main(["transform", str(gauss_file), "-o", str(s), "--op", "steiner",
                 "--axis", "0", "--offset", "0.0"]) == 0
    assert np.array_equal(read_grid(s).values, read_grid(gauss_file).values)
    h = tmp_path / "h.grid"
    assert main(["transform", str(gauss_file), "-o", str(h), "--op", "homothety", "--lambda", "0.5"]) == 0
    a = tmp_path / "a.grid"
    assert main(["transform", str(gauss_file), "-o", str(a), "--op", "asplund",
                 "--other", str(gauss_file)]) == 0
    assert read_grid(a).spec.count == (513,)


@pytest.mark.parametrize(
    "extra",
    [
        ["--op", "steiner"],
        ["--op", "asplund"],
        ["--op", "homothety"],
        ["--op", "polar", "--z", "a,b"],
        ["--op", "polar", "--z", "1,2"],
        ["--op", "spin"],
    ],
)
def test_usage_errors(gauss_file, tmp_path, extra):
    assert main(["transform", str(gauss_file), "-o", str(tmp_path / "x.grid")] + extra) == 2


def test_parse_error_and_missing_file(tmp_path):
    bad = tmp_path / "bad.grid"
    bad.write_text("kind: logconcave\ndim: 1\n")
    assert main(["transform", str(bad), "-o", str(tmp_path / "o"), "--op", "polar"]) == 2
    assert main(["transform", str(tmp_path / "nope"), "-o", str(tmp_path / "o"), "--op", "polar"]) == 2
    assert main(["verify", "--lambda", "1.5"]) == 2


def test_numeric_abort_exit_code(gauss_file, tmp_path, monkeypatch):
    monkeypatch.setenv("LOGCONCAVE_GRID_CAP", "100")
    assert main(["transform", str(gauss_file), "-o", str(tmp_path / "o"), "--op", "polar"]) == 3
    out = tmp_path / "rep"
    assert main(["verify", "--suite", "theorem1", "--dim", "1", "--count", "1", "--out", str(out)]) == 3
    report = json.loads((out / "report.json").read_text())
    assert not report["ok"] and "GridCapExceeded" in report["suites"]["theorem1"]["error"]


def test_verify_passes_and_writes_reports(tmp_path):
    out = tmp_path / "rep"
    assert main(["verify", "--suite", "theorem1", "--dim", "1", "--count", "3", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["ok"] and report["first_failure"] is None
    assert len((out / "theorem1.csv").read_text().splitlines()) == 4


def test_counterexample_fails_with_witness(tmp_path):
    out = tmp_path / "rep"
    assert main(["verify", "--suite", "lemma21", "--counterexample", "--out", str(out)]) == 1
    report = json.loads((out / "report.json").read_text())
    assert report["suites"]["lemma21"]["witness"]["x"] > 0


def test_corpus_is_deterministic(tmp_path):
    for run in ("a", "b"):
        assert main(["corpus", "--family", "gaussian", "--count", "3", "--seed", "7",
                     "--grid", "65", "--out", str(tmp_path / run)]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 3
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "logconcave", "--help"], capture_output=True, text=True)
    assert done.returncode == 0
    assert "transform" in done.stdout and "verify" in done.stdout


def test_conjugate_of_indicator_file(tmp_path):
    src = tmp_path / "box.grid"
    src.write_text("kind: convex-extended\ndim: 1\naxis0: -2.0 2.0 9\nvalues:\n"
                   + "inf\ninf\n0\n0\n0\n0\n0\ninf\ninf\n")
    out = tmp_path / "c.grid"
    assert main(["transform", str(src), "-o", str(out), "--op", "conjugate"]) == 0
    psi = read_grid(out)
    assert np.array_equal(psi.values, np.abs(psi.spec.nodes(0)))
