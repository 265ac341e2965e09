"""Complex structures, integrability, and the radial coordinate."""

import numpy as np
import pytest

from skewtorsion.charts import ChartError, bonneau_chart, random_chart, round_s4_chart
from skewtorsion.moduli import (
    InvariantACS, acs_radial, acs_swapped, asymptotic_check, nijenhuis_norm,
    r_coordinate, r_curve,
)


def test_acs_validation():
    J = acs_radial()
    assert np.allclose(J.J @ J.J, -np.eye(4))
    assert np.allclose(J.J.T @ J.J, np.eye(4))
    with pytest.raises(ValueError):
        InvariantACS(tuple(map(tuple, np.eye(4))))


def test_radial_pairing_is_integrable_on_both_s4_charts():
    chart, _ = bonneau_chart(0.0)
    assert nijenhuis_norm(chart, acs_radial()) <= 1e-9
    assert nijenhuis_norm(round_s4_chart(), acs_radial()) <= 1e-9


def test_radial_pairing_is_integrable_for_any_profiles():
    assert nijenhuis_norm(random_chart(5), acs_radial()) <= 1e-9


def test_swapped_pairing_obstruction():
    chart, _ = bonneau_chart(0.0)
    assert nijenhuis_norm(chart, acs_swapped()) > 1e-2
    # with equal orbit profiles (b = c) the obstruction degenerates
    assert nijenhuis_norm(round_s4_chart(), acs_swapped()) <= 1e-9


def test_r_coordinate_normalization_monotone():
    assert r_coordinate(0.0, -1.0, -1.0) == pytest.approx(1.0)
    xs = np.linspace(-4.0, -0.1, 12)
    r = r_coordinate(0.0, xs, -1.0)
    assert np.all(np.diff(r) > 0)


def test_r_coordinate_domain_check():
    with pytest.raises(ChartError):
        r_coordinate(0.0, 0.5, -1.0)


def test_r_coordinate_endpoint_limits():
    k = 0.0
    t = np.array([1e-5, 1e-6, 1e-7])
    r = r_coordinate(k, k - t, -1.0)
    lim = t * r
    assert np.max(np.abs(lim - lim[-1])) / lim[-1] < 1e-3
    assert lim[-1] > 0
    s = np.array([1e5, 1e6, 1e7])
    r = r_coordinate(k, -s, -1.0)
    lim = s * r
    assert np.max(np.abs(lim - lim[-1])) / lim[-1] < 1e-3
    assert lim[-1] > 0


@pytest.mark.parametrize("k", [0.0, 1.0])
def test_asymptotic_slopes(k):
    res = asymptotic_check(k)
    assert res["slope_at_k"] == pytest.approx(1.0, abs=0.01)
    assert res["slope_at_minus_infinity"] == pytest.approx(1.0, abs=0.01)
    assert res["monotone"]


def test_round_chart_radial_ratio_is_positive():
    # positivity of a/c makes any radial coordinate monotone
    chart = round_s4_chart()
    pt = chart.at(chart.sample_grid(32))
    from skewtorsion import jets
    ratio = np.asarray(jets.value_of(pt.a / pt.c))
    assert np.all(ratio > 0)


def test_r_curve_export_shape():
    x, r = r_curve(0.0, nodes=64)
    assert len(x) == len(r) == 64
    assert np.all(np.diff(r) > 0)


def test_write_r_curve_csv(tmp_path):
    from skewtorsion.moduli import write_r_curve_csv
    path = tmp_path / "rcurve.csv"
    write_r_curve_csv(str(path), 0.0, nodes=32)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x,R"
    assert len(lines) == 33
    rs = [float(ln.split(",")[1]) for ln in lines[1:]]
    assert all(b > a for a, b in zip(rs, rs[1:]))
