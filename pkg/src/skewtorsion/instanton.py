"""Induced connection on the bundle of self-dual 2-forms and its gauge data.

A metric connection preserves the splitting of 2-forms, so it induces an
so(3) connection on Lambda+.  Its curvature, computed from the structure
equation of the connection forms, reproduces the Lambda+ input/output
entries of the 6x6 curvature operator (the transposed [A | C] rows, since
the 2-form direction of the induced curvature is the differentiation pair
of R) up to the fixed factor sqrt(2); that identification is asserted,
not assumed.  The anti-self-dual part of the induced curvature is exactly
the block whose vanishing is the Einstein-with-torsion condition, so for
Einstein data the induced connection is an instanton.

The gauge probe compares the connections induced by torsions +H and -H.
A gauge transformation intertwining them is annihilated by the curvature
of the product connection, so its candidates per point are the kernel of
the 54x9 system F+(E) G - G F-(E) = 0 over the six 2-form directions E.
The kernel section, continued in x and normalized, is then tested for
covariant constancy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import frame as F
from . import jets
from .charts import FramePoint, InvariantChart, InvariantForm
from .connections import (
    AffineConnection, curvature, exterior_ops, levi_civita, ricci_and_scalar,
    with_skew_torsion, full_components,
)
from .decomposition import operator_blocks, _fro, _tf, _sym

__all__ = [
    "InducedConnection", "GaugeProbeReport", "induced_lambda_plus",
    "self_duality_residual", "yang_mills_density_check", "killing_residual",
    "gauge_equivalence_probe",
]

# so(3) generators pairing the + basis: (T_s)_pq = eps_spq
_GEN = np.einsum("spq->spq", F._EPS3)

# curvature of the induced connection in the + basis equals this factor
# times the (A|B) rows of the operator (calibrated on the round sphere)
LAMBDA_PLUS_CURVATURE_SCALE = np.sqrt(2.0)


@dataclass
class InducedConnection:
    """so(3)-valued connection on Lambda+ along a frame batch."""

    pt: FramePoint
    omega: list                 # omega[i] = 3x3 nested list of jets
    F_mats: np.ndarray          # F(e_i, e_j) values, shape (4, 4, 3, 3, n)
    F_sd: np.ndarray            # F paired with the six E_Q, shape (3, 3, 6, n)
    rows: np.ndarray            # F in generator components / scale: (3, 6, n)
    block_residual: float       # sup |rows - (A|B)|

    def curvature_2forms(self) -> np.ndarray:
        """F^s as 2-forms in the +- basis, shape (3, 6, n) (true scale)."""
        return LAMBDA_PLUS_CURVATURE_SCALE * self.rows


def _omega_matrices(conn: AffineConnection):
    """Connection forms of the induced Lambda+ connection, jets."""
    pt = conn.pt
    omega = []
    for i in range(4):
        mat = [[None] * 3 for _ in range(3)]
        for q in range(3):
            # D_i E_q+ as a 2-form via the derivation action on bivectors
            comps = {}
            for (a, b), w in _basis_pairs(q):
                for m in range(4):
                    _accumulate(comps, (m, b), conn.gamma[i][a][m] * w)
                    _accumulate(comps, (a, m), conn.gamma[i][b][m] * w)
            for p in range(3):
                acc = None
                for (a, b), w in _basis_pairs(p):
                    v = comps.get((a, b))
                    vb = comps.get((b, a))
                    term = None
                    if v is not None:
                        term = w * v
                    if vb is not None:
                        term = (term - w * vb) if term is not None else (-w) * vb
                    if term is not None:
                        acc = term if acc is None else acc + term
                mat[p][q] = acc if acc is not None else jets.Jet.constant(0.0, 2)
        omega.append(mat)
    return omega


def _basis_pairs(p: int):
    """Increasing index pairs and weights of E_p (0..5)."""
    e = F.SD_BASIS[p]
    return [(idx, w) for idx, w in zip(F.MULTI_INDICES[2], e.comps) if w != 0.0]


def _accumulate(d, key, val):
    d[key] = d[key] + val if key in d else val


def induced_lambda_plus(conn: AffineConnection) -> InducedConnection:
    """Induced so(3) connection and curvature, checked against the operator."""
    if not conn.metric_compatible:
        raise ValueError("the splitting is only preserved by metric connections")
    pt = conn.pt
    omega = _omega_matrices(conn)
    n = pt.npoints

    def val(j):
        return np.broadcast_to(np.asarray(jets.value_of(j), dtype=float), pt.x.shape)

    om = np.empty((4, 3, 3, n))
    dom = np.empty((4, 3, 3, n))
    for i in range(4):
        for p in range(3):
            for q in range(3):
                om[i, p, q] = val(omega[i][p][q])
                dom[i, p, q] = val(pt.e1(omega[i][p][q]))

    cs = np.empty((4, 4, 4, n))
    csj = pt.structure_functions()
    for i in range(4):
        for j in range(4):
            for k in range(4):
                cs[i, j, k] = val(csj[i][j][k])

    # structure equation: F_ij = e_i(w_j) - e_j(w_i) + [w_i, w_j] - c^m_ij w_m
    Fm = np.zeros((4, 4, 3, 3, n))
    Fm[0] += dom
    Fm[:, 0] -= dom
    comm = np.einsum("ipr...,jrq...->ijpq...", om, om)
    Fm += comm - np.einsum("ijpq...->jipq...", comm)
    Fm -= np.einsum("ijm...,mpq...->ijpq...", cs, om)

    # pair the 2-form slots with the +- basis and extract generator rows
    F_sd = 0.5 * np.einsum("qij,ijpr...->prq...", F.SD_WEIGHTS, Fm)
    rows = (0.5 * np.einsum("spq,pqm...->sm...", _GEN, F_sd)
            / LAMBDA_PLUS_CURVATURE_SCALE)

    # the direction index is the differentiation pair of R, so the induced
    # curvature reproduces the Lambda+ input/output entries transposed
    M = F.operator_from_tensor(curvature(conn).components)
    A, _, Cb, _ = operator_blocks(M)
    AC = np.concatenate([np.einsum("pq...->qp...", A),
                         np.einsum("pq...->qp...", Cb)], axis=1)
    block_residual = float(np.max(np.abs(rows - AC)))
    return InducedConnection(pt=pt, omega=omega, F_mats=Fm, F_sd=F_sd,
                             rows=rows, block_residual=block_residual)


def self_duality_residual(ic: InducedConnection) -> float:
    """Sup norm of the anti-self-dual part of the induced curvature.

    Reported on the operator scale, where it coincides with the Frobenius
    norm of the Einstein block, so it vanishes exactly when the data is
    Einstein with skew torsion.
    """
    return float(np.max(_fro(ic.rows[:, 3:])))


def yang_mills_density_check(chart: InvariantChart, H: InvariantForm,
                             nodes: int = 64) -> dict:
    """Pointwise Yang-Mills density identities for the +-H instanton pair.

    Returns sup norms of (i) density(+H) - density(-H) and (ii) each
    density against |W+|^2 + |s Id/12|^2 + |(d*H)+/2|^2, plus the densities
    themselves.  The identities are exact when the data is Einstein with
    closed torsion; the caller sees the residuals either way.
    """
    pt = chart.at(chart.sample_grid(nodes))
    Hf = H.at(pt)
    lc = levi_civita(pt)
    out = {}
    dens = {}
    for sign, tag in ((+1.0, "plus"), (-1.0, "minus")):
        conn = with_skew_torsion(lc, sign * Hf)
        ic = induced_lambda_plus(conn)
        dens[tag] = np.einsum("sm...,sm...->...", ic.rows, ic.rows)
        out[f"block_residual_{tag}"] = ic.block_residual

        ext = exterior_ops(pt, sign * Hf)
        Rn = curvature(conn)
        rd = ricci_and_scalar(Rn)
        A = operator_blocks(F.operator_from_tensor(Rn.components))[0]
        Wp = _tf(_sym(A), 3)
        dsH = F.components_in_sd_basis(ext.dstar_H)
        phi_p = np.array([np.broadcast_to(v, pt.x.shape) for v in dsH[:3]])
        formula = (np.einsum("pq...,pq...->...", Wp, Wp)
                   + 3.0 * (rd.scalar / 12.0) ** 2
                   + 0.25 * np.einsum("r...,r...->...", phi_p, phi_p))
        out[f"formula_residual_{tag}"] = float(np.max(np.abs(dens[tag] - formula)))
    out["pair_residual"] = float(np.max(np.abs(dens["plus"] - dens["minus"])))
    out["density"] = dens["plus"]
    return out


def killing_residual(chart: InvariantChart, H: InvariantForm, nodes: int = 64) -> dict:
    """Sup norm of S(D^g h) for h = *H, with the closedness of H checked."""
    pt = chart.at(chart.sample_grid(nodes))
    ext = exterior_ops(pt, H.at(pt))
    dH_sup = float(np.max(np.abs(full_components(ext.dH, pt))))
    return {
        "killing_residual": float(np.max(_fro(ext.sym_grad_h))),
        "dH_sup": dH_sup,
        "closed": dH_sup <= 1e-10,
    }


@dataclass
class GaugeProbeReport:
    """Outcome of the +-H gauge-equivalence probe on Lambda+."""

    x: np.ndarray
    kernel_dims: np.ndarray
    singular_values: np.ndarray   # (n, 9)
    gaps: np.ndarray              # sigma_8 / sigma_9 per node
    threshold: float
    sup_nabla_g: float
    inf_nabla_g_mid: float
    verdict: str
    notes: str = ""
    section: np.ndarray | None = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "verdict": self.verdict,
            "kernel_dim_mode": int(np.bincount(self.kernel_dims).argmax()),
            "kernel_dim_one_fraction": float(np.mean(self.kernel_dims == 1)),
            "min_gap": float(np.min(self.gaps)),
            "threshold": self.threshold,
            "sup_nabla_g": self.sup_nabla_g,
            "inf_nabla_g_mid": self.inf_nabla_g_mid,
            "notes": self.notes,
        }


def gauge_equivalence_probe(chart: InvariantChart, H: InvariantForm,
                            nodes: int = 128) -> GaugeProbeReport:
    """Probe whether the +H and -H induced connections are gauge equivalent.

    Per node, the kernel of F+(E) G = G F-(E) over the six 2-form
    directions is computed by singular value decomposition; a
    one-dimensional kernel is continued in x and tested for covariant
    constancy under the product connection.
    """
    x = chart.sample_grid(nodes)
    pt = chart.at(x)
    Hf = H.at(pt)
    lc = levi_civita(pt)
    ic_p = induced_lambda_plus(with_skew_torsion(lc, Hf))
    ic_m = induced_lambda_plus(with_skew_torsion(lc, -1.0 * Hf))

    # F(E_Q) as 3x3 matrices per node: shape (6, 3, 3, n) -> (n, 6, 3, 3)
    Fp = np.einsum("pqm...->...mpq", ic_p.F_sd)
    Fm = np.einsum("pqm...->...mpq", ic_m.F_sd)
    n = pt.npoints
    eye = np.eye(3)
    L = (np.einsum("nmpa,qb->nmpqab", Fp, eye)
         - np.einsum("pa,nmbq->nmpqab", eye, Fm)).reshape(n, 54, 9)

    U, S, Vt = np.linalg.svd(L)
    sigma_max = S[:, 0]
    threshold_rel = 1e-7
    # when the curvature cancels identically, sigma_max itself is rounding
    # noise; the squared connection-coefficient scale supplies the floor
    om_scale = max(float(np.max(np.abs(_omega_values(ic_p)))),
                   float(np.max(np.abs(_omega_values(ic_m))))) ** 2
    tau = threshold_rel * np.maximum(sigma_max, max(om_scale, 1e-300))
    kdims = np.sum(S <= tau[:, None], axis=1)
    with np.errstate(divide="ignore"):
        gaps = np.where(S[:, 8] > 0, S[:, 7] / np.maximum(S[:, 8], 1e-300), np.inf)

    thr = 10.0 * threshold_rel * float(np.median(sigma_max))

    frac1 = float(np.mean(kdims == 1))
    frac9 = float(np.mean(kdims == 9))
    section = None
    sup_ng = np.nan
    inf_mid = np.nan
    if frac9 >= 0.95:
        verdict, notes = "equivalent", "curvature vanishes; every g intertwines"
    elif frac1 >= 0.95:
        # kernel section, sign-aligned along x
        g = Vt[:, 8, :].reshape(n, 3, 3)
        g /= np.linalg.norm(g.reshape(n, 9), axis=1)[:, None, None]
        for i in range(1, n):
            if np.sum(g[i] * g[i - 1]) < 0.0:
                g[i] = -g[i]
        section = g

        # covariant derivative of the section under the product connection
        omp = _omega_values(ic_p)
        omm = _omega_values(ic_m)
        gp = np.gradient(g, x, axis=0)
        a_val = np.broadcast_to(np.asarray(jets.value_of(pt.a)), x.shape)
        ng2 = np.zeros(n)
        for i in range(4):
            wp = np.moveaxis(omp[i], -1, 0)
            wm = np.moveaxis(omm[i], -1, 0)
            di = wp @ g - g @ wm
            if i == 0:
                di = di + gp / a_val[:, None, None]
            ng2 += np.einsum("npq,npq->n", di, di)
        ng = np.sqrt(ng2)
        sup_ng = float(np.max(ng))
        lo, hi = n // 4, (3 * n) // 4
        inf_mid = float(np.min(ng[lo:hi]))
        if sup_ng <= thr:
            verdict, notes = "equivalent", "kernel section is parallel"
        elif inf_mid > thr:
            verdict, notes = "inequivalent", "kernel section is nowhere parallel on the middle interval"
        else:
            verdict, notes = "inconclusive", "kernel section neither parallel nor uniformly non-parallel"
    else:
        verdict = "inconclusive"
        notes = f"kernel dimension not constant: fractions dim1={frac1:.2f}, dim9={frac9:.2f}"

    return GaugeProbeReport(
        x=x, kernel_dims=kdims, singular_values=S, gaps=gaps, threshold=thr,
        sup_nabla_g=float(sup_ng), inf_nabla_g_mid=float(inf_mid),
        verdict=verdict, notes=notes, section=section,
    )


def _omega_values(ic: InducedConnection) -> np.ndarray:
    pt = ic.pt
    out = np.empty((4, 3, 3, pt.npoints))
    for i in range(4):
        for p in range(3):
            for q in range(3):
                out[i, p, q] = np.broadcast_to(
                    np.asarray(jets.value_of(ic.omega[i][p][q])), pt.x.shape)
    return out
