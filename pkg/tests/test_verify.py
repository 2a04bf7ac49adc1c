import json
import math

import pytest

from qswitch.noise import Grid, verify
from qswitch.noise import cqd_table as t2

PI = math.pi


@pytest.fixture(scope="module")
def report():
    return verify("verification")


def test_report_passes(report):
    assert report["status"] == "pass"
    assert report["uncatalogued"] == 0
    assert report["tolerance"] == 1e-9
    json.dumps(report)   # serializable as is


def test_every_check_accounts_for_every_point(report):
    for c in report["checks"]:
        assert c["points"] == c["agree"] + c["catalogued"] + c["uncatalogued"]
        assert c["max_abs_err_after_fixes"] <= 1e-9
    names = {c["name"] for c in report["checks"]}
    assert {"F_AD", "F_PD", "rho_A", "rho_P", "phase-independence", "exchange-symmetry"} <= names
    assert {f"cqd-{k}" for k in t2.PRINTED} <= names


def test_printed_f_pd_needs_no_fix(report):
    f_pd = next(c for c in report["checks"] if c["name"] == "F_PD")
    assert f_pd["agree"] == f_pd["points"] == 275


def test_fad_discrepancy_is_reported(report):
    ad = [d for d in report["discrepancies"] if d["check"] == "F_AD"]
    assert ad and all(d["catalogued"] for d in ad)
    assert any("fad-coefficients" in d["corrections"] for d in ad)
    worst = [d for d in ad if d["point"]["eta"] == 1.0 and d["point"]["theta1"] == PI / 4
             and d["point"]["theta2"] == PI / 4]
    assert worst[0]["printed_value"] == pytest.approx(-6)
    assert worst[0]["pipeline_value"] == pytest.approx(0.25)
    assert worst[0]["corrected_value"] == pytest.approx(0.25)
    for key in ("point", "printed_value", "pipeline_value", "note"):
        assert key in worst[0]


def test_spot_checks(report):
    spots = {s["name"]: s for s in report["spot_checks"]}
    ad = spots["F_AD at eta=1, theta1=theta2=pi/4"]
    assert ad["printed_value"] == pytest.approx(-6)
    assert ad["pipeline_value"] == pytest.approx(0.25)
    assert spots["F_PD at eta=1, theta1=theta2=pi/4"]["printed_value"] == pytest.approx(0.25)
    assert spots["F'_AD5(0.5)"]["printed_value"] == pytest.approx(0.5625, abs=1e-12)


def test_cqd_table_reading_flagged(report):
    assert [r["id"] for r in report["readings"]] == ["cqd-pd1-symbol"]
    for label in t2.PRINTED:
        check = next(c for c in report["checks"] if c["name"] == f"cqd-{label}")
        assert check["uncatalogued"] == 0
    zero = [d for d in report["discrepancies"] if d["check"] in ("cqd-AD5", "cqd-PD2")]
    assert zero and all(d["corrections"] == ["zero-probability-branch"] for d in zero)


def test_alternative_routing_reported(report):
    alt = report["alternative_routing"]
    assert set(alt) == set(t2.PRINTED)
    assert not alt["AD3"]["matches"] and alt["AD5"]["matches"]


def test_wrong_formula_is_uncatalogued(monkeypatch):
    monkeypatch.setitem(t2.PRINTED, "PD2", lambda e: (2 - 2 * e + e ** 2) / 2 + 0.01 * e)
    r = verify(Grid((0.0, 0.5), (PI / 4,), (PI / 6,), (0.0,), (0.0,)), cqd_etas=(0.0, 0.5))
    assert r["status"] == "fail" and r["uncatalogued"] > 0
    bad = [d for d in r["discrepancies"] if not d["catalogued"]]
    assert {d["check"] for d in bad} == {"cqd-PD2"}
