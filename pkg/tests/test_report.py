import json

from skewtorsion.report import SCHEMA_VERSION, RefusedError, VerificationReport, fingerprint


def test_status_rules():
    rep = VerificationReport("demo")
    rep.add("small", 1e-12, 1e-9)
    rep.add("vacuous", 5.0, 1e-9, vacuous=True)
    assert rep.passed
    rep.add("large", 1e-3, 1e-9)
    assert not rep.passed
    assert [c.name for c in rep.failures] == ["large"]
    rep.refuse("gate")
    assert rep["gate"].status == "refused"


def test_json_schema_and_nan():
    rep = VerificationReport("demo", fingerprint="abc")
    rep.add("x", 0.0, 1e-9)
    rep.refuse("gate")
    data = json.loads(rep.to_json())
    assert data["schema_version"] == SCHEMA_VERSION
    assert data["checks"][1]["residual"] is None
    assert rep.to_json() == rep.to_json()


def test_extend_prefixes():
    a, b = VerificationReport("a"), VerificationReport("b")
    b.add("inner", 0.0, 1.0)
    a.extend(b, "outer: ")
    assert "outer: inner" in a


def test_fingerprint_mode_independent():
    from fractions import Fraction
    import numpy as np
    exact = np.array([Fraction(1, 4), Fraction(1, 2)], dtype=object)
    assert fingerprint(exact) == fingerprint(np.array([0.25, 0.5]))
    assert fingerprint(np.array([0.25, 0.5])) != fingerprint(np.array([0.25, 0.51]))


def test_refused_error_names_gate():
    err = RefusedError("xi-invariance", None, "why")
    assert err.gate == "xi-invariance" and "xi-invariance" in str(err)
