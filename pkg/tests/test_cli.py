from pathlib import Path

from charsub.cli import main


def test_density_example(capsys):
    code = main(["density", "--set", "progression(2,2)", "--f", "x", "--g", "n", "--checkpoints", "geo:1e1..1e6"])
    out = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert out[0].startswith("n,count")
    assert out[-1].split(",")[4] == "0.5"


def test_converge_example(capsys):
    code = main(["converge", "--x", "rational 1/8", "--seq", "const-ratio 3", "--f", "log(1+x)",
                 "--g", "sqrt(n)", "--eps", "1/10", "--N", "10000"])
    assert code == 0
    assert "overall: non-member-evidence" in capsys.readouterr().out


def test_parse_check_rejects_reversed_interval(capsys):
    assert main(["parse-check", "--set", "union k in 1.. : [k, k-1]"]) == 2
    assert "error" in capsys.readouterr().err.lower()


def test_usage_and_domain_errors(capsys):
    assert main(["converge", "--x", "rational 1/8", "--seq", "const-ratio 3", "--eps", "1/2", "--N", "10"]) == 2
    assert main(["parse-check", "--expr", "1 +"]) == 2
    assert main(["parse-check"]) == 2
    assert main(["nonsense"]) == 2


def test_blocks_and_out_directory(tmp_path, capsys):
    assert main(["blocks", "--K", "5", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "blocks.csv").read_text().splitlines()
    assert [r.split(",")[1] for r in rows[1:]] == ["1", "2", "4", "8", "16", "32"]
    assert (tmp_path / "manifest.json").exists()


def test_certify_then_verify(tmp_path, capsys):
    assert main(["certify", "qbounded", "--x", "rational 1/8", "--seq", "const-ratio 3", "--N", "500",
                 "--out", str(tmp_path)]) == 0
    cert = tmp_path / "certificate.cert"
    assert main(["certify", "verify", str(cert)]) == 0
    assert "valid: nonmembership-qbounded" in capsys.readouterr().out
    bad = tmp_path / "bad.cert"
    bad.write_text(cert.read_text().replace("band: 1/9 1/2", "band: 1/7 1/2"))
    assert main(["certify", "verify", str(bad)]) == 1


def test_probe_without_certificate_exits_one(capsys):
    assert main(["certify", "probe", "--seq", "ratio 2", "--set", "progression(1,1)", "--N", "500"]) == 1


def test_scale_sequence_hits_magnitude_cap(capsys):
    assert main(["construct", "scale", "--f1", "x", "--f2", "log(1+x)", "--K", "5"]) == 3
    assert "magnitude cap" in capsys.readouterr().err


def test_experiment_list(capsys):
    assert main(["experiment", "--list"]) == 0
    assert "theorem41" in capsys.readouterr().out
