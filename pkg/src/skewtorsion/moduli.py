"""Invariant almost complex structures and the radial holomorphic coordinate.

The natural pairing on these charts takes (1,0)-forms spanned by
a dx + i c s3 and s1 + i s2, i.e. J e1 = e4, J e2 = e3 in the orthonormal
frame.  Integrability is measured by the Nijenhuis tensor evaluated
through the frame brackets; the pairing above is integrable for any
profiles, while pairings mixing the radial direction with s1 or s2 are
not unless b = c.

For the S^4 family, a holomorphic radial coordinate R solves
f dR = a dx, f R = c, so log R = Int a/c dx with a/c evaluated in the
cancelled form (k - x)/(W (1 + x^2)); R grows like 1/(k - x) at the
orbit-collapse end and like 1/|x| at -infinity, which the asymptotic
check fits numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import jets
from .charts import BonneauFamily, ChartError, InvariantChart

__all__ = [
    "InvariantACS", "acs_radial", "acs_swapped", "nijenhuis_norm",
    "r_coordinate", "r_curve", "write_r_curve_csv", "asymptotic_check",
]


@dataclass(frozen=True)
class InvariantACS:
    """Constant orthogonal almost complex structure in the invariant frame."""

    matrix: tuple  # 4x4, J e_j = sum_i matrix[i][j] e_i

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError("J must be 4x4")
        if np.max(np.abs(m @ m + np.eye(4))) > 1e-12:
            raise ValueError("J^2 must be -Id")
        if np.max(np.abs(m.T @ m - np.eye(4))) > 1e-12:
            raise ValueError("J must be orthogonal")

    @property
    def J(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float)


def _pairing(i1, j1, i2, j2) -> InvariantACS:
    m = np.zeros((4, 4))
    m[j1, i1] = 1.0
    m[i1, j1] = -1.0
    m[j2, i2] = 1.0
    m[i2, j2] = -1.0
    return InvariantACS(tuple(map(tuple, m)))


def acs_radial() -> InvariantACS:
    """J e1 = e4, J e2 = e3: the integrable invariant pairing."""
    return _pairing(0, 3, 1, 2)


def acs_swapped() -> InvariantACS:
    """J e1 = e2, J e3 = e4: pairs the radial direction with an s1 orbit
    direction; not integrable unless b = c."""
    return _pairing(0, 1, 2, 3)


def nijenhuis_norm(pt_or_chart, J: InvariantACS, nodes: int = 64) -> float:
    """Sup norm of N(e_i, e_j) over frame pairs and grid points."""
    if isinstance(pt_or_chart, InvariantChart):
        pt = pt_or_chart.at(pt_or_chart.sample_grid(nodes))
    else:
        pt = pt_or_chart
    cs = pt.structure_functions()
    n = pt.npoints
    c = np.empty((4, 4, 4, n))
    for i in range(4):
        for j in range(4):
            for k in range(4):
                c[i, j, k] = np.broadcast_to(
                    np.asarray(jets.value_of(cs[i][j][k])), pt.x.shape)
    Jm = J.J
    # [JX, JY] - J[JX, Y] - J[X, JY] - [X, Y] on frame fields; J constant
    jj = np.einsum("ai,bj,abk...->ijk...", Jm, Jm, c)
    j1 = np.einsum("ai,ajm...,km->ijk...", Jm, c, Jm)
    j2 = np.einsum("bj,ibm...,km->ijk...", Jm, c, Jm)
    N = jj - j1 - j2 - c
    return float(np.max(np.abs(N)))


def r_coordinate(k: float, x, x0: float) -> np.ndarray:
    """Holomorphic radius R(x) = exp Int_{x0}^{x} a/c dt, with R(x0) = 1.

    The quadrature is cumulative over the sorted query points, so batches
    of points share work.
    """
    fam = BonneauFamily(k)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs >= k) or x0 >= k:
        raise ChartError("x must lie below k")

    def integrand(t):
        return float(jets.value_of(fam.a_over_c(
            jets.Jet.constant(np.asarray(t, dtype=float), 2))))

    pts = np.unique(np.concatenate([xs, [x0]]))
    cum = np.zeros_like(pts)
    for i in range(1, len(pts)):
        seg, _ = quad(integrand, pts[i - 1], pts[i], limit=200,
                      epsabs=1e-13, epsrel=1e-12)
        cum[i] = cum[i - 1] + seg
    cum -= cum[np.searchsorted(pts, x0)]
    out = np.exp(cum[np.searchsorted(pts, xs)])
    return out if np.ndim(x) else float(out[0])


def r_curve(k: float, nodes: int = 200, x0: float | None = None):
    """(x, R(x)) samples across the compactified domain, for CSV export."""
    from .charts import bonneau_chart
    chart, _ = bonneau_chart(k)
    x = chart.sample_grid(nodes)
    if x0 is None:
        x0 = float(x[len(x) // 2])
    return x, r_coordinate(k, x, x0)


def write_r_curve_csv(path: str, k: float, nodes: int = 200,
                      x0: float | None = None) -> None:
    """Export (x, R(x)) as CSV with full-precision floats."""
    import csv
    x, r = r_curve(k, nodes=nodes, x0=x0)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "R"])
        for xi, ri in zip(x, r):
            w.writerow([format(xi, ".17g"), format(ri, ".17g")])


def _fit_slope(logr: np.ndarray, logt: np.ndarray) -> float:
    A = np.vstack([logt, np.ones_like(logt)]).T
    coef, *_ = np.linalg.lstsq(A, logr, rcond=None)
    return float(coef[0])


def asymptotic_check(k: float, decade_points: int = 12) -> dict:
    """Slopes of log R against the model divergences at both ends.

    Near x = k the fit is against -log(k - x) over k - x in
    [1e-7, 1e-6]; near -infinity against -log|x| over |x| in [1e6, 1e7].
    Both slopes tend to 1.
    """
    x0 = k - 1.0
    t = np.geomspace(1e-7, 1e-6, decade_points)
    xk = k - t
    rk = r_coordinate(k, xk, x0)
    slope_k = _fit_slope(np.log(rk), -np.log(t))

    s = np.geomspace(1e6, 1e7, decade_points)
    xinf = -s
    rinf = r_coordinate(k, xinf, x0)
    slope_inf = _fit_slope(np.log(rinf), -np.log(s))

    mono = np.all(np.diff(r_coordinate(k, np.linspace(x0 - 5.0, k - 1e-3, 40), x0)) > 0)
    return {
        "slope_at_k": slope_k,
        "slope_at_minus_infinity": slope_inf,
        "monotone": bool(mono),
    }
