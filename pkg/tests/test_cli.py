"""CLI smoke tests: ber sweeps, diversity fits, duality-check, config files."""


from zfdual.cli import main
from zfdual.sim import BerCurve, BerPoint, read_csv, write_csv


def test_ber_writes_csv(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    rc = main(
        [
            "ber", "--scheme", "dual-alamouti", "--n-tx", "2",
            "--constellation", "qpsk", "--snr-db", "0:4:8",
            "--min-errors", "20", "--max-trials", "2000", "--seed", "1",
            "--out", str(out),
        ]
    )
    assert rc == 0
    curve = read_csv(out)
    assert len(curve.points) == 3
    assert "ber=" in capsys.readouterr().out


def test_ber_config_file_with_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "scheme = dual-alamouti\n"
        "n-tx = 2\n"
        "constellation = qpsk\n"
        "snr-db = 0:4:4\n"
        "min-errors = 10\n"
        "max-trials = 1000\n"
        "seed = 5\n"
        "# comment line\n"
    )
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["ber", "--config", str(cfg), "--out", str(out1)]) == 0
    # flag overrides the file's seed; a different seed changes the draws
    assert main(["ber", "--config", str(cfg), "--seed", "6", "--out", str(out2)]) == 0
    c1, c2 = read_csv(out1), read_csv(out2)
    assert len(c1.points) == 2
    assert [p.bit_errors for p in c1.points] != [p.bit_errors for p in c2.points]


def test_ber_missing_required_option(tmp_path, capsys):
    rc = main(["ber", "--scheme", "svd"])
    assert rc == 2
    assert "missing required" in capsys.readouterr().err


def test_diversity_command(tmp_path, capsys):
    curve = BerCurve(scheme="downlink-ic", n_tx=2, constellation="bpsk")
    for snr in (35.0, 40.0, 45.0):
        ber = 10 ** (-2.0 * snr / 10)
        curve.points.append(
            BerPoint(snr_db=snr, bits=int(1e4 / ber), bit_errors=10_000, ber=ber,
                     ci95_halfwidth=0.0, truncated=False)
        )
    path = tmp_path / "c.csv"
    write_csv(curve, path)
    rc = main(["diversity", "--in", str(path), "--ber-window", "1e-10:1e-5"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "slope = 2.0000" in out


def test_duality_check_passes(capsys):
    rc = main(["duality-check", "--trials", "100", "--n", "2", "--seed", "7"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2


def test_duality_check_n3(capsys):
    assert main(["duality-check", "--trials", "50", "--n", "3", "--seed", "9"]) == 0
