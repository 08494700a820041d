import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import g_hat_plus, hat_points
from hatsiegel import jsonio
from hatsiegel.cli import run
from hatsiegel.group import Sl2Pair, random_sl2_pair
from hatsiegel.halfspace import HatPoint
from hatsiegel.picard import DualPoint
from hatsiegel.polarization import RiemannFormSpec

I_PT = {"tau": {"re": 0, "im": 1}, "z": {"re": 0, "im": 0}}
TWO_I = {"tau": {"re": 0, "im": 2}, "z": {"re": 0, "im": 0}}
OMEGA_PT = {"tau": {"re": 0.3, "im": 2}, "z": {"re": 0.1, "im": 1}}
OMEGA_SPEC = {"kind": "omega", "omega": OMEGA_PT}


def call(argv, payload=None):
    out = io.StringIO()
    text = payload if isinstance(payload, str) else json.dumps(payload or {})
    status = run(argv, io.StringIO(text), out)
    return status, json.loads(out.getvalue()), out.getvalue()


# -- examples ------------------------------------------------------------------

def test_dist_example():
    status, doc, _ = call(["dist"], {"p1": I_PT, "p2": TWO_I})
    assert status == 0
    res = doc["result"]
    assert res["rho"] == pytest.approx(math.sqrt(2) * math.log(2), abs=1e-15)
    assert res["lambda"] == pytest.approx(2) and res["mu"] == pytest.approx(2)
    assert "tolerances" in doc["diagnostics"]


def test_bundle_dim_example():
    status, doc, _ = call(["bundle", "dim", "--kind", "omega", "--imtau", "2", "--imz", "1"])
    assert status == 0 and doc["result"] == {"dimension": 3}
    assert doc["diagnostics"]["pfaffian"] == -3 and doc["diagnostics"]["det_E"] == 9


def test_verify_single_suite():
    status, doc, _ = call(["verify", "--suite", "killing", "--seed", "7"])
    assert status == 0 and doc["result"]["passed"]
    assert doc["diagnostics"]["suites_run"] == ["killing"]


# -- exit codes and errors ---------------------------------------------------------

def test_malformed_json_is_usage_error():
    status, doc, _ = call(["dist"], "{not json")
    assert status == 2 and doc["error"]["type"] == "UsageError"


def test_domain_error_exit_2():
    bad = {"tau": {"re": 0, "im": 1}, "z": {"re": 0, "im": 2}}
    status, doc, _ = call(["dist"], {"p1": bad, "p2": I_PT})
    assert status == 2 and doc["error"]["type"] == "DomainError"


def test_unknown_command_and_missing_keys():
    assert call(["nope"])[0] == 2
    assert call([])[0] == 2
    assert call(["dist"], {"p1": I_PT})[0] == 2
    assert call(["verify", "--suite", "bogus"])[0] == 2


def test_check_failure_exit_1():
    status, doc, _ = call(["group", "check"], {"matrix": (2 * np.eye(4)).tolist()})
    assert status == 1 and doc["result"]["in_g_hat"] is False
    status, doc, _ = call(["bundle", "check"], {"kind": "omega", "omega": {"tau": {"re": 0, "im": 1.5}, "z": 0}})
    assert status == 1 and not doc["result"]["integral"]
    status, _, _ = call(["point"], {"matrix": [[{"re": 0, "im": 1}, {"re": 0, "im": 2}], [{"re": 0, "im": 2}, {"re": 0, "im": 1}]]})
    assert status == 1


def test_threshold_override_turns_pass_into_fail():
    payload = {"p1": I_PT, "p2": OMEGA_PT, "samples": 4}
    assert call(["geodesic"], payload)[0] == 0
    assert call(["geodesic", "--abs-tol", "1e-300", "--rel-tol", "1e-300"], payload)[0] == 1


def test_input_file(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"p1": I_PT, "p2": TWO_I}))
    status, doc, _ = call(["dist", "--input", str(f)], "")
    assert status == 0 and doc["result"]["lambda"] == pytest.approx(2)
    assert call(["dist", "--input", str(tmp_path / "missing.json")])[0] == 2


# -- every subcommand runs -----------------------------------------------------

G = {"matrix": np.eye(4).tolist(), "epsilon": 1}

SMOKE = [
    (["point"], I_PT),
    (["point", "--seed", "3"], {"random": 2}),
    (["act"], {"element": G, "point": OMEGA_PT}),
    (["cayley"], {"point": OMEGA_PT}),
    (["cayley"], {"disk": [[0.2, 0], [0, 0.2]]}),
    (["group", "check"], {"matrix": np.eye(4).tolist()}),
    (["group", "split"], {"element": G}),
    (["group", "fuse"], {"pair": {"m1": [[1, 1], [0, 1]], "m2": [[1, 0], [0, 1]]}, "epsilon": -1}),
    (["group", "sample", "--seed", "1"], None),
    (["geodesic"], {"p1": I_PT, "p2": OMEGA_PT}),
    (["volume"], {"point": OMEGA_PT, "element": G}),
    (["laplacian"], {"point": OMEGA_PT, "function": "log_det_im", "element": G}),
    (["bundle", "gram"], OMEGA_SPEC),
    (["bundle", "check"], OMEGA_SPEC),
    (["bundle", "dim"], {"spec": {"kind": "star", "omega": OMEGA_PT}}),
    (["bundle", "semichar"], {"spec": OMEGA_SPEC, "n": [1, 0, 1, 0]}),
    (["bundle", "factor"], {"spec": OMEGA_SPEC, "alpha": [1, 0, 0, 1], "z": [0.1, {"re": 0, "im": 0.2}]}),
    (["theta", "eval"], {"omega": I_PT, "z": [0, 0]}),
    (["theta", "qp"], {"omega": OMEGA_PT, "z": [0.1, 0.2], "m": [1, 0], "k": [0, 1]}),
    (["theta", "bridge"], {"omega": OMEGA_PT, "z": [0.1, 0.2], "alpha": [1, 0, 0, 0]}),
    (["picard", "dual"], {"omega": OMEGA_PT}),
    (["picard", "poincare"], {"omega": OMEGA_PT, "trials": 20}),
    (["picard", "translate"], {"spec": OMEGA_SPEC, "a": [1, 0]}),
    (["picard", "kernel"], OMEGA_SPEC),
    (["picard", "square"], {"spec": OMEGA_SPEC, "a": [0.1, 0.2], "b": [0.3, -0.1], "trials": 10}),
    (["picard", "curvature"], {"spec": {"kind": "star", "omega": OMEGA_PT}}),
    (["picard", "hodge"], None),
]


@pytest.mark.parametrize("argv,payload", SMOKE, ids=[" ".join(a) for a, _ in SMOKE])
def test_every_command(argv, payload):
    status, doc, _ = call(argv, payload)
    assert status == 0, doc
    assert set(doc) == {"version", "command", "result", "diagnostics"}


def test_command_results():
    assert call(["picard", "kernel"], OMEGA_SPEC)[1]["result"]["divisors"] == [1, 1, 3, 3]
    assert call(["picard", "hodge"])[1]["result"]["hodge"] == [[1, 2, 1], [2, 4, 2], [1, 2, 1]]
    tv = call(["theta", "eval"], {"omega": I_PT, "z": [0, 0]})[1]["result"]
    assert tv["value"]["re"] == pytest.approx(1.18034, abs=1e-5) and tv["tail_bound"] <= 1e-12
    fused = call(["group", "fuse"], {"pair": {"m1": [[1, 1], [0, 1]], "m2": [[1, 1], [0, 1]]}})[1]["result"]
    moved = call(["act"], {"element": fused["element"], "point": I_PT})[1]["result"]["point"]
    assert moved["tau"] == {"re": 1.0, "im": 1.0}


# -- determinism and serialisation -----------------------------------------------------

def test_output_is_deterministic():
    for argv, payload in [(["group", "sample", "--seed", "4"], {"count": 3}),
                          (["picard", "poincare", "--seed", "2"], {"omega": OMEGA_PT, "trials": 10})]:
        assert call(argv, payload)[2] == call(argv, payload)[2]
    assert call(["group", "sample", "--seed", "4"])[2] != call(["group", "sample", "--seed", "5"])[2]


def test_flags_before_or_after_command():
    a = call(["--seed", "4", "group", "sample"])[2]
    b = call(["group", "sample", "--seed", "4"])[2]
    assert a == b


def test_floats_have_17_significant_digits():
    text = jsonio.dumps({"x": 0.1, "n": 3, "big": 1e300, "nan": float("nan")}, None)
    assert text == '{"x": 0.10000000000000001, "n": 3, "big": 1.0000000000000001e+300, "nan": null}'


@given(hat_points())
def test_hatpoint_round_trip(p):
    assert jsonio.hatpoint_from_json(json.loads(jsonio.dumps(p))) == p


@given(g_hat_plus())
def test_ghat_round_trip(g):
    back = jsonio.ghat_from_json(json.loads(jsonio.dumps(g)))
    assert np.array_equal(back.matrix, g.matrix) and back.epsilon == g.epsilon


@given(st.integers(0, 2**32 - 1))
def test_sl2pair_round_trip(seed):
    p = random_sl2_pair(np.random.default_rng(seed))
    back = jsonio.sl2pair_from_json(json.loads(jsonio.dumps(p)))
    assert np.array_equal(back.m1, p.m1) and np.array_equal(back.m2, p.m2)


@given(hat_points(), st.sampled_from(["omega", "star", "custom"]))
def test_spec_round_trip(p, kind):
    spec = RiemannFormSpec.of_kind(kind, p, [[3, 1 - 2j], [1 + 2j, 5.5]] if kind == "custom" else None)
    back = jsonio.spec_from_json(json.loads(jsonio.dumps(spec)))
    assert back.kind == spec.kind and back.lattice == spec.lattice and np.array_equal(back.h, spec.h)


@given(st.complex_numbers(allow_nan=False, allow_infinity=False), st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_dualpoint_round_trip(a, b):
    d = DualPoint([a, b])
    assert np.array_equal(jsonio.dualpoint_from_json(json.loads(jsonio.dumps(d))).c, d.c)


def test_spec_kind_mismatch_rejected():
    from hatsiegel.numeric import DomainError

    with pytest.raises(DomainError):
        jsonio.spec_from_json({"kind": "omega", "h": [[2, 0], [0, 2]], "omega": I_PT})


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hatsiegel", "picard", "hodge", "--compact"],
                          capture_output=True, text=True, stdin=subprocess.DEVNULL)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["betti"] == [1, 4, 6, 4, 1]
