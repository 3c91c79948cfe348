import json
from fractions import Fraction

import pytest

from charsub import subgroup as S
from charsub.errors import HypothesisFailure
from charsub.experiments import CATALOG, run_antichain_separation, run_named, run_theorem41, run_theorem42


@pytest.fixture(scope="module")
def reports():
    return {name: run_named(name) for name in CATALOG}


def test_every_experiment_reports_as_expected(reports):
    for name, rep in reports.items():
        assert rep.claims, name
        assert rep.ok, rep.text()
        assert rep.text().rstrip().endswith("verdict: as expected")


def test_certificates_replay_through_the_slow_route(reports):
    seen = 0
    for rep in reports.values():
        for cert in rep.certificates.values():
            assert S.verify_certificate(cert.serialize()).serialize() == cert.serialize()
            seen += 1
    assert seen >= 2


def test_written_layout(reports, tmp_path):
    rep = reports["theorem42"]
    out = rep.write(tmp_path)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "theorem42" and manifest["seeds"] is None
    assert (out / "report.txt").read_text() == rep.text()
    for name in rep.csvs:
        assert (out / f"{name}.csv").exists() and (out / f"{name}.svg").exists()
    for name in rep.certificates:
        assert (out / "certificates" / f"{name}.cert").exists()


def test_rerun_is_byte_identical(tmp_path):
    a = run_named("antichain").write(tmp_path / "a")
    b = run_named("antichain").write(tmp_path / "b")
    for p in sorted(a.rglob("*.csv")) + [a / "report.txt"]:
        assert p.read_bytes() == (b / p.relative_to(a)).read_bytes()


def test_hypothesis_rejections():
    with pytest.raises(HypothesisFailure):
        run_theorem41(alpha=Fraction(1))
    with pytest.raises(HypothesisFailure):
        run_theorem42(alpha=Fraction(1, 2), beta=Fraction(1, 2))
    with pytest.raises(HypothesisFailure):
        run_antichain_separation(P=(1,), Q=(1,))
    with pytest.raises(HypothesisFailure):
        run_named("nonexistent")
