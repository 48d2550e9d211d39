import json
import os

import pytest

from thetaroot.cli import fmt_sig, main, parse_rat
from thetaroot.series import TruncSeries, dumps_fps, loads_fps
from thetaroot.domains import INT
from gmpy2 import mpq


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_rat():
    assert parse_rat("1/2") == mpq(1, 2)
    assert parse_rat("0.25") == mpq(1, 4)
    assert parse_rat("2") == 2
    assert parse_rat("1e-7") == mpq(1, 10**7)


def test_fmt_sig_deterministic():
    a = fmt_sig(mpq(1, 3))
    assert a == fmt_sig(mpq(1, 3))
    assert a.startswith("0.3333333333")


def test_xi0_prefix(capsys):
    code, out, err = run(capsys, "xi0", "--order", "10")
    assert code == 0
    assert out.strip() == "1,1,2,4,9,21,52,133,351,948,2610"
    assert "method=newton" in err


def test_xi0_requires_order(capsys):
    with pytest.raises(SystemExit) as e:
        run(capsys, "xi0")
    assert e.value.code == 2


def test_xi0_cache_round_trip(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    emit1 = str(tmp_path / "a.fps")
    emit2 = str(tmp_path / "b.fps")
    code, out1, err1 = run(capsys, "xi0", "--order", "20", "--cache-dir", cache,
                           "--emit", emit1)
    assert code == 0
    assert "(cached)" not in err1
    code, out2, err2 = run(capsys, "xi0", "--order", "20", "--cache-dir", cache,
                           "--emit", emit2)
    assert code == 0
    assert "(cached)" in err2
    assert out1 == out2
    assert open(emit1, "rb").read() == open(emit2, "rb").read()
    s = loads_fps(open(emit1).read())
    assert int(s[10]) == 2610


def test_xi0_cache_digest_mismatch(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    run(capsys, "xi0", "--order", "12", "--cache-dir", cache)
    (fps_file,) = [f for f in os.listdir(cache) if f.endswith(".fps")]
    path = os.path.join(cache, fps_file)
    with open(path, "a") as fh:
        fh.write("# tampered\n")
    code, out, err = run(capsys, "xi0", "--order", "12", "--cache-dir", cache)
    assert code == 0
    assert "(cached)" not in err  # miss forces a recompute
    assert out.split(",")[10] == "2610"


def test_xi0_rr_rational(capsys):
    code, out, _ = run(capsys, "xi0", "--order", "6", "--source", "rr", "--q", "1/2")
    assert code == 0
    assert out.split(",")[0] == "1"


def test_xi0_rr_needs_q(capsys):
    with pytest.raises(SystemExit) as e:
        run(capsys, "xi0", "--order", "6", "--source", "rr")
    assert e.value.code == 2


def test_verify_quick_json(tmp_path, capsys):
    out_json = str(tmp_path / "verdicts.json")
    code, out, _ = run(capsys, "verify", "--order", "60", "--json", out_json)
    assert code == 0
    assert "hard failures" in out
    payload = json.load(open(out_json))
    assert len(payload) == 20
    for item in payload:
        assert set(item) == {"id", "order_checked", "pass", "first_fail",
                             "notes", "wall_ms"}
        assert item["pass"] is True


def test_transform_inverse_euler(tmp_path, capsys):
    src = str(tmp_path / "in.fps")
    open(src, "w").write(dumps_fps(TruncSeries(INT, 8, [1, 1, 2, 3, 5, 7, 11, 15, 22])))
    code, out, _ = run(capsys, "transform", "--in", src, "--op", "inverse-euler")
    assert code == 0
    assert out.strip() == "1,1,1,1,1,1,1,1"


def test_transform_euler_round_trip(tmp_path, capsys):
    exps = str(tmp_path / "c.fps")
    open(exps, "w").write(dumps_fps(TruncSeries(INT, 6, [1, 1, 1, 1, 1, 1, 1])))
    out_path = str(tmp_path / "p.fps")
    code, _, _ = run(capsys, "transform", "--in", exps, "--op", "euler",
                     "--out", out_path)
    assert code == 0
    g = loads_fps(open(out_path).read())
    assert [int(mpq(c)) for c in g.coeffs] == [1, 1, 2, 3, 5, 7, 11]


def test_transform_s_alpha_failure_exit_code(tmp_path, capsys):
    src = str(tmp_path / "xi.fps")
    run(capsys, "xi0", "--order", "12", "--emit", src)
    code, out, _ = run(capsys, "transform", "--in", src, "--op", "s-alpha",
                       "--alpha", "-3")
    assert code == 1
    payload = json.loads(out.strip().splitlines()[-1])
    assert payload["pass"] is False
    assert payload["first_fail"]["index"] == 3


def test_transform_log_convex(tmp_path, capsys):
    src = str(tmp_path / "xi.fps")
    run(capsys, "xi0", "--order", "12", "--emit", src)
    code, out, _ = run(capsys, "transform", "--in", src, "--op", "log-convex")
    assert code == 0


def test_figure1_artifacts_and_thread_determinism(tmp_path, capsys):
    args = ["figure1", "--qmin", "0", "--qmax", "0.5", "--step", "0.25",
            "--mmax", "5", "--tol", "1e-6"]
    d1, d4 = str(tmp_path / "t1"), str(tmp_path / "t4")
    code, _, _ = run(capsys, *args, "--out", d1, "--threads", "1")
    assert code == 0
    code, _, _ = run(capsys, *args, "--out", d4, "--threads", "4")
    assert code == 0
    for name in ("figure1.csv", "alpha_star.csv"):
        b1 = open(os.path.join(d1, name), "rb").read()
        b4 = open(os.path.join(d4, name), "rb").read()
        assert b1 == b4
    lines = open(os.path.join(d1, "figure1.csv")).read().splitlines()
    assert lines[0] == "q,m,root"
    alines = open(os.path.join(d1, "alpha_star.csv")).read().splitlines()
    assert alines[0] == "q,alpha_star_lower"
    assert alines[1].startswith("0,-2.0000")


def test_collision_and_delta1(capsys):
    code, out, _ = run(capsys, "collision", "--tol", "1e-8")
    assert code == 0
    x, y = out.split()
    assert x.startswith("-2.3203769442") and y.startswith("0.309249338")
    code, out, _ = run(capsys, "delta1", "--tol", "1e-8")
    assert code == 0
    assert out.strip().startswith("0.2247945929")


def test_identities_command(capsys):
    code, out, _ = run(capsys, "identities", "--upto-order", "16",
                       "--upto-finite", "6")
    assert code == 0
    lines = [l for l in out.strip().splitlines()]
    assert len(lines) == 9
    assert all(l.startswith("PASS") for l in lines)


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["not-a-command"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2


def test_runtime_error_exit_one(tmp_path, capsys):
    missing = str(tmp_path / "nope.fps")
    code, _, err = run(capsys, "transform", "--in", missing, "--op", "log-convex")
    assert code == 1
    assert "error:" in err
