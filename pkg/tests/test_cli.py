import json

from gpade.cli import _int_str, emit_report, main

HALF = "m = 1\nalpha0 = 1\nalpha1 = 1/2\n"
ONE = "m = 1\nalpha0 = 1\nalpha1 = 1\n"
BAD = "m = 2\nalpha0 = 1/2\nalpha1 = 1/3\nalpha2 = 4/3\n"


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_pass(params_file, capsys):
    path = params_file(HALF)
    code, out, _ = run(capsys, ["verify", "--params", path, "--n", "1", "--n0", "1"])
    assert code == 0
    assert "verdict\tPASS" in out
    assert "determinant_monomial.exponent\t3" in out
    assert "determinant_monomial.leading\t4/75" in out


def test_verify_deterministic(params_file, capsys):
    path = params_file(HALF)
    argv = ["verify", "--params", path, "--n", "3", "--n0", "4", "--format", "json"]
    _, out1, _ = run(capsys, argv)
    _, out2, _ = run(capsys, argv)
    assert out1 == out2
    json.loads(out1)


def test_construct_dump(params_file, capsys):
    path = params_file(HALF)
    code, out, _ = run(capsys, ["construct", "--params", path, "--n", "1", "--n0", "1"])
    assert code == 0
    assert "0\tQ\t0\t-5\t3" in out
    code, out, _ = run(
        capsys, ["construct", "--params", path, "--n", "1", "--n0", "1", "--scaled"]
    )
    assert code == 0
    assert "# scaled_by_D = 12600" in out
    assert "1\t1\t2\t672\t1" in out


def test_construct_json_roundtrip(params_file, capsys):
    path = params_file(HALF)
    code, out, _ = run(
        capsys, ["construct", "--params", path, "--n", "1", "--n0", "1", "--format", "json"]
    )
    data = json.loads(out)
    rows = {(r["i"], r["poly"], r["degree"]): (r["numerator"], r["denominator"]) for r in data["coefficients"]}
    assert rows[(0, "Q", 0)] == ("-5", "3")
    assert rows[(1, "1", 2)] == ("4", "75")


def test_integer_difference_exit_code(params_file, capsys):
    path = params_file(BAD)
    code, _, err = run(capsys, ["construct", "--params", path, "--n", "1,1", "--n0", "1"])
    assert code == 2
    assert "alpha_1 - alpha_2" in err


def test_missing_file_exit_code(capsys):
    code, _, err = run(capsys, ["verify", "--params", "/nonexistent.params", "--n", "1", "--n0", "1"])
    assert code == 2


def test_usage_error_exit_code(params_file, capsys):
    path = params_file(HALF)
    code, _, _ = run(capsys, ["verify", "--params", path, "--n", "oops", "--n0", "1"])
    assert code == 2
    code, _, _ = run(capsys, ["unknown-command"])
    assert code == 2


def test_denominators(params_file, capsys):
    path = params_file(HALF)
    code, out, _ = run(capsys, ["denominators", "--params", path, "--n", "1", "--n0", "1"])
    assert code == 0
    assert "D1\t15\t3*5\t-" in out
    assert "D2\t840\t" in out
    assert "D\t12600\t" in out


def test_constants(params_file, capsys):
    path = params_file(HALF)
    code, out, _ = run(capsys, ["constants", "--params", path, "--format", "json"])
    assert code == 0
    data = json.loads(out)
    assert data["global_relation"]["log_C"]["value"].startswith("24.15888308")
    assert data["global_relation"]["log_C"]["direction"] == "upper"
    assert data["size_constants"]["c2"]["value"].startswith("11.09035")


def test_constants_restricted_block(params_file, capsys):
    path = params_file(ONE)
    code, out, _ = run(
        capsys,
        [
            "constants", "--params", path, "--theta-mode", "sharp", "--vartheta", "2",
            "--beta", "1/20014458431", "--format", "json",
        ],
    )
    assert code == 0
    data = json.loads(out)
    assert data["restricted"]["a1_variant"] == "leading_parameter_one"
    assert data["restricted"]["c_vartheta"] == 6
    assert data["restricted"]["M0"]["hi"].startswith("21.0000000")


def test_padic_audit(params_file, capsys):
    path = params_file(HALF)
    code, out, _ = run(
        capsys,
        [
            "padic", "--params", path, "--beta", "8/3", "--p", "2",
            "--ell", "1,1", "--tau", "1/2", "--delta", "1/20", "--format", "json",
        ],
    )
    assert code == 0
    data = json.loads(out)
    assert data["audits"][0]["witness"]["lambda"] == "58800"
    assert data["audits"][0]["dominance_holds"] is True


def test_padic_jobs_match(params_file, capsys):
    path = params_file(HALF)
    base = [
        "padic", "--params", path, "--beta", "8/3", "--p", "2",
        "--ell", "1,1", "--ell", "5,-4", "--tau", "1/2", "--delta", "1/20",
        "--format", "json",
    ]
    _, seq, _ = run(capsys, base + ["--jobs", "1"])
    _, par, _ = run(capsys, base + ["--jobs", "2"])
    assert seq == par


def test_global_probe(params_file, capsys):
    path = params_file(ONE)
    code, out, _ = run(
        capsys, ["global", "--params", path, "--a", "3", "--ell", "0,1", "--format", "json"]
    )
    assert code == 0
    data = json.loads(out)
    assert data["probe"]["certified_nonzero_at"] == [3]
    code, out, _ = run(
        capsys, ["global", "--params", path, "--a", "2", "--ell", "0,1", "--format", "json"]
    )
    data = json.loads(out)
    assert data["probe"]["certified_nonzero_at"] == []


def test_restricted_with_explicit_flags(params_file, capsys):
    path = params_file(ONE)
    code, out, _ = run(
        capsys,
        [
            "restricted", "--params", path, "--beta", "1/20014458431",
            "--theta-mode", "sharp", "--vartheta", "2",
            "--M", "25", "--candidate-n", "123", "--format", "json",
        ],
    )
    assert code == 0
    data = json.loads(out)
    assert data["constants"]["M"] == 25
    assert data["constants"]["nearest_n_used"] is False
    final = next(c for c in data["checks"] if c["name"] == "final_lower_bound")
    assert final["passed"] is True


def test_restricted_hypothesis_exit(params_file, capsys):
    path = params_file(ONE)
    code, _, err = run(
        capsys,
        ["restricted", "--params", path, "--beta", "1/100", "--theta-mode", "sharp"],
    )
    assert code == 2
    assert "hypothesis" in err.lower()


def test_exit_code_mapping(params_file, capsys, monkeypatch):
    # mathematical check failures exit 1; hypothesis/usage problems exit 2
    import gpade.cli as cli_mod
    from gpade.errors import HypothesisFailure, IntegralityViolation, NonMonomialDeterminant

    path = params_file(HALF)

    def raises(exc):
        def cmd(args, gp):
            raise exc

        return cmd

    for exc, expected in [
        (NonMonomialDeterminant("boom"), 1),
        (IntegralityViolation("boom"), 1),
        (HypothesisFailure("boom"), 2),
        (ValueError("boom"), 2),
    ]:
        monkeypatch.setitem(cli_mod._COMMANDS, "verify", raises(exc))
        code, _, err = run(capsys, ["verify", "--params", path, "--n", "1", "--n0", "1"])
        assert code == expected, (exc, code)
        assert "boom" in err


def test_int_abbreviation():
    n = 123456789 * 10**300 + 987654321
    s = _int_str(n, exact=False)
    assert s.startswith("123456789") and s.endswith("(309digits)")
    assert "..." in s
    assert _int_str(n, exact=True) == str(n)
    assert _int_str(-(10**45), exact=False).startswith("-100000000000...")
    big = 7**20000  # beyond the default int-to-str guard
    s2 = _int_str(big, exact=False)
    assert s2.endswith("digits)")


def test_emit_report_formats():
    result = {"b": {"x": 1}, "a": [True, None, "s"]}
    js = emit_report(result, "json")
    assert json.loads(js) == {"b": {"x": 1}, "a": [True, None, "s"]}
    tsv = emit_report(result, "tsv")
    lines = tsv.strip().split("\n")
    assert lines[0] == "key\tvalue"
    assert lines[1].startswith("a.0\tTrue")
    # empty results still produce the header row
    assert emit_report({}, "tsv") == "key\tvalue\n"
