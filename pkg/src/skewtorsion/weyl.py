"""Weyl connections: torsion-free, conformally metric, from a 1-form.

The connection attached to a 1-form w is

    D_X Y = D^g_X Y - w(X) Y / 2 - w(Y) X / 2 + g(X, Y) w# / 2,

torsion-free with Dg = w (x) g.  Its Ricci tensor is computed with the
shared frame curvature routine (no metric-compatibility assumption) and
compared against the closed formulas

    S(Ric^D) = Ric^g - (|w|^2 g - w (x) w)/2 + S(D^g w) - (d*w/2) g,
    s^D      = s^g - (3/2)|w|^2 - 3 d*w,

so the Einstein-Weyl residual (the trace-free symmetric Ricci) comes out
of two independent routes.  With h = *H this trace-free tensor equals the
Einstein-with-skew-torsion tensor of the metric pair, which is the
correspondence the round trip below exercises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame import KForm, hodge_star, norm_sq
from .charts import FramePoint, InvariantChart, InvariantForm
from .connections import (
    AffineConnection, cov_deriv_one_form, codifferential, curvature,
    levi_civita, ricci_and_scalar, _grid_value, full_components,
)
from .decomposition import einstein_tensor_point

__all__ = [
    "WeylStructure", "weyl_connection", "weyl_structure",
    "einstein_weyl_residual", "torsion_weyl_roundtrip",
]

_EYE4 = np.eye(4)


@dataclass
class WeylStructure:
    pt: FramePoint
    omega: KForm
    D: AffineConnection
    dg_residual: float        # sup |Dg - w (x) g|
    torsion_residual: float


def weyl_connection(pt: FramePoint, omega: InvariantForm | KForm) -> AffineConnection:
    """Torsion-free connection with Dg = omega (x) g."""
    w = omega.at(pt) if isinstance(omega, InvariantForm) else omega
    if w.degree != 1:
        raise ValueError("need a 1-form")
    lc = levi_civita(pt)
    gamma = [[[lc.gamma[i][j][k]
               - 0.5 * (w[(i,)] if j == k else 0.0)
               - 0.5 * (w[(j,)] if i == k else 0.0)
               + 0.5 * (w[(k,)] if i == j else 0.0)
               for k in range(4)] for j in range(4)] for i in range(4)]
    return AffineConnection(pt, gamma, metric_compatible=False)


def weyl_structure(pt: FramePoint, omega: InvariantForm | KForm) -> WeylStructure:
    """Connection plus the verified compatibility residuals."""
    w = omega.at(pt) if isinstance(omega, InvariantForm) else omega
    D = weyl_connection(pt, w)
    # (D_i g)(e_j, e_k) = -Gamma_kij - Gamma_jik for constant frame metric
    wd = np.empty((4, 4, 4, pt.npoints))
    for i in range(4):
        for j in range(4):
            for k in range(4):
                wd[i, j, k] = -_grid_value(D.gamma[i][j][k] + D.gamma[i][k][j], pt)
    wv = full_components(w, pt)
    target = np.einsum("i...,jk->ijk...", wv, _EYE4)
    dg_res = float(np.max(np.abs(wd - target)))
    tor = D.torsion_form()
    tor_res = float(np.max(np.abs([_grid_value(c, pt) for c in tor.comps])))
    return WeylStructure(pt=pt, omega=w, D=D, dg_residual=dg_res, torsion_residual=tor_res)


def einstein_weyl_residual(chart: InvariantChart, omega: InvariantForm,
                           nodes: int = 64) -> dict:
    """Trace-free symmetric Ricci of the Weyl connection, two routes.

    Route (i) contracts the directly computed curvature of D; route (ii)
    evaluates the closed Ricci/scalar formulas.  Returns the two sups and
    their mutual difference.
    """
    pt = chart.at(chart.sample_grid(nodes))
    w = omega.at(pt)
    D = weyl_connection(pt, w)
    rd = ricci_and_scalar(curvature(D))
    sym = 0.5 * (rd.ric + np.einsum("ij...->ji...", rd.ric))
    s0_direct = sym - 0.25 * rd.scalar * _EYE4[..., None]

    lc = levi_civita(pt)
    rg = ricci_and_scalar(curvature(lc))
    wv = full_components(w, pt)
    w2 = np.einsum("i...,i...->...", wv, wv)
    dw = cov_deriv_one_form(pt, lc, w)
    Sw = np.empty((4, 4, pt.npoints))
    for i in range(4):
        for j in range(4):
            Sw[i, j] = 0.5 * _grid_value(dw[i][j] + dw[j][i], pt)
    dstar_w = _grid_value(codifferential(pt, w).comps[0], pt)

    sym_formula = (rg.ric - 0.5 * (w2[None, None] * _EYE4[..., None]
                                   - np.einsum("i...,j...->ij...", wv, wv))
                   + Sw - 0.5 * dstar_w * _EYE4[..., None])
    s_formula = rg.scalar - 1.5 * w2 - 3.0 * dstar_w
    s0_formula = sym_formula - 0.25 * np.einsum("ii...->...", sym_formula) * _EYE4[..., None]

    def fro(m):
        return np.sqrt(np.einsum("ij...,ij...->...", m, m))

    return {
        "residual_direct": float(np.max(fro(s0_direct))),
        "residual_formula": float(np.max(fro(s0_formula))),
        "route_difference": float(np.max(np.abs(s0_direct - s0_formula))),
        "scalar_difference": float(np.max(np.abs(rd.scalar - s_formula))),
    }


def torsion_weyl_roundtrip(chart: InvariantChart, H: InvariantForm,
                           nodes: int = 64) -> dict:
    """Round trip torsion -> 1-form -> torsion and the Einstein pairing.

    Maps H to w = *H and back to H' = -*w; in this star convention
    ** = -1 on odd degrees, so H' = +H and the closing sign is +1.  Both
    torsion signs are checked to give the same Einstein residual, and the
    Einstein-Weyl residual of w is reported alongside.
    """
    pt = chart.at(chart.sample_grid(nodes))
    Hf = H.at(pt)
    w = hodge_star(Hf)
    H_back = -1.0 * hodge_star(w)

    diff_plus = max(
        float(np.max(np.abs(_grid_value(a - b, pt))))
        for a, b in zip(H_back.comps, Hf.comps))
    diff_minus = max(
        float(np.max(np.abs(_grid_value(a + b, pt))))
        for a, b in zip(H_back.comps, Hf.comps))
    sign = +1 if diff_plus <= diff_minus else -1

    def einstein_sup(form3: KForm) -> float:
        T = einstein_tensor_point(pt, form3)
        return float(np.max(np.sqrt(np.einsum("ij...,ij...->...", T, T))))

    res_plus = einstein_sup(Hf)
    res_minus = einstein_sup(-1.0 * Hf)

    D = weyl_connection(pt, w)
    rd = ricci_and_scalar(curvature(D))
    sym = 0.5 * (rd.ric + np.einsum("ij...->ji...", rd.ric))
    s0 = sym - 0.25 * rd.scalar * _EYE4[..., None]

    norm_h = float(np.max(np.abs(_grid_value(norm_sq(Hf), pt)
                                 - _grid_value(norm_sq(H_back), pt))))
    return {
        "closing_sign": sign,
        "roundtrip_residual": min(diff_plus, diff_minus),
        "norm_preserved": norm_h,
        "einstein_residual_plus": res_plus,
        "einstein_residual_minus": res_minus,
        "einstein_weyl_residual": float(np.max(np.sqrt(np.einsum("ij...,ij...->...", s0, s0)))),
    }
