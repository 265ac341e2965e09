"""Cohomogeneity-one chart machinery for oriented 4-manifolds.

A chart is an interval (or circle) of a transverse coordinate x crossed
with an SU(2) (or T^3) orbit, carrying the diagonal metric

    ds^2 = a(x)^2 dx^2 + b(x)^2 [(s1)^2 + (s2)^2] + c(x)^2 (s3)^2

in a basis of invariant one-forms with ds^i = (1/2) eps_ijk s^j ^ s^k, so
that (1/4) sum (s^i)^2 is the unit round 3-sphere.  The oriented
orthonormal frame is e1 = (1/a) d/dx, e2 = b s1-dual, e3 = b s2-dual,
e4 = c s3-dual, with volume a b^2 c dx ^ s1 ^ s2 ^ s3.

Profiles are jet-transparent callables, so every downstream quantity
(brackets, connection coefficients, curvature) differentiates exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .jets import Jet
from .frame import KForm, MULTI_INDICES

__all__ = [
    "ChartError", "Domain", "InvariantChart", "FramePoint",
    "InvariantForm", "BonneauFamily", "bonneau_chart", "bonneau_torsion",
    "round_s4_chart", "product_chart", "flat_torsion", "flat_torus_chart",
    "random_chart", "random_torsion", "random_one_form", "chart_from_dict",
    "structure_functions",
]

ORBIT_VOLUME_SU2 = 16.0 * math.pi ** 2  # integral of s1^s2^s3 over SU(2)
ORBIT_VOLUME_T3 = (2.0 * math.pi) ** 3

JET_ORDER = 4


class ChartError(ValueError):
    """Invalid chart parameters (positivity failure, bad domain)."""


@dataclass(frozen=True)
class Domain:
    lo: float
    hi: float
    periodic: bool = False


@dataclass
class InvariantChart:
    """Immutable chart: profiles, domain, orbit structure and quadrature map."""

    name: str
    fa: Callable[[Jet], Jet]
    fb: Callable[[Jet], Jet]
    fc: Callable[[Jet], Jet]
    domain: Domain
    structure_mode: str = "su2"  # or "abelian"
    orbit_volume: float = ORBIT_VOLUME_SU2
    params: dict = field(default_factory=dict)

    def at(self, x) -> "FramePoint":
        """Frame data at interior points x (scalar or 1-d array)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lo, hi = self.domain.lo, self.domain.hi
        if not self.domain.periodic:
            if np.any(x <= lo) or np.any(x >= hi):
                raise ChartError(f"x outside open domain ({lo}, {hi})")
        seed = Jet.variable(x, JET_ORDER)
        a, b, c = self.fa(seed), self.fb(seed), self.fc(seed)
        for name, p in (("a", a), ("b", b), ("c", c)):
            if np.any(jets.value_of(p) <= 0.0):
                bad = x[np.asarray(jets.value_of(p)) <= 0.0]
                raise ChartError(f"profile {name} not positive at x={bad[:3]}")
        return FramePoint(self, x, a, b, c)

    # -- grids ---------------------------------------------------------------

    def map_from_unit(self, u: np.ndarray):
        """(x, dx/du) for u in (0,1); charts on infinite domains compactify."""
        u = np.asarray(u, dtype=float)
        if self.name == "bonneau":
            k = self.params["k"]
            t = np.tan(0.5 * np.pi * u)
            return k - t, -(0.5 * np.pi) * (1.0 + t * t)
        lo, hi = self.domain.lo, self.domain.hi
        return lo + (hi - lo) * u, np.full_like(u, hi - lo)

    def quadrature(self, n: int):
        """Gauss-Legendre nodes/weights in x, including the |dx/du| factor."""
        un, uw = np.polynomial.legendre.leggauss(n)
        u = 0.5 * (un + 1.0)
        x, dxdu = self.map_from_unit(u)
        w = 0.5 * uw * np.abs(dxdu)
        order = np.argsort(x)
        return x[order], w[order]

    def sample_grid(self, n: int) -> np.ndarray:
        """Uniform interior grid in the compactified coordinate."""
        u = (np.arange(n) + 0.5) / n
        x, _ = self.map_from_unit(u)
        return np.sort(x)

    def volume_weight(self, pt: "FramePoint") -> np.ndarray:
        """Density of the volume form against dx: a b^2 c * orbit volume."""
        w = pt.a * pt.b * pt.b * pt.c
        return self.orbit_volume * np.broadcast_to(jets.value_of(w), pt.x.shape)

    def to_dict(self) -> dict:
        return {
            "type": self.name,
            "params": dict(self.params),
            "domain": {
                "lo": self.domain.lo,
                "hi": self.domain.hi,
                "periodic": self.domain.periodic,
            },
            "structure_mode": self.structure_mode,
        }


class FramePoint:
    """Chart data evaluated at a batch of points: profiles and brackets."""

    def __init__(self, chart: InvariantChart, x, a: Jet, b: Jet, c: Jet):
        self.chart = chart
        self.x = x
        self.a, self.b, self.c = a, b, c
        self._struct = None

    @property
    def npoints(self) -> int:
        return len(self.x)

    def e1(self, f: Jet) -> Jet:
        """Derivative along the unit radial frame field e1 = (1/a) d/dx."""
        return f.derivative() / self.a

    def frame_derivative(self, i: int, f: Jet) -> Jet:
        """e_i(f) for an invariant scalar: zero along orbit directions."""
        if i == 0:
            return self.e1(f)
        return Jet.constant(0.0, max(f.order - 1, 0))

    def structure_functions(self):
        """c[i][j][k] with [e_i, e_j] = sum_k c[i][j][k] e_k (jets)."""
        if self._struct is not None:
            return self._struct
        a, b, c = self.a, self.b, self.c
        zero = Jet.constant(0.0, a.order - 1)
        cs = [[[zero for _ in range(4)] for _ in range(4)] for _ in range(4)]

        def put(i, j, k, v):
            cs[i][j][k] = v
            cs[j][i][k] = -v

        rb = b.derivative() / (self.a * b)
        rc = c.derivative() / (self.a * c)
        put(0, 1, 1, -rb)
        put(0, 2, 2, -rb)
        put(0, 3, 3, -rc)
        if self.chart.structure_mode == "su2":
            put(1, 2, 3, -(c / (b * b)))
            put(1, 3, 2, 1.0 / c * Jet.constant(1.0, c.order))
            put(2, 3, 1, -(1.0 / c) * Jet.constant(1.0, c.order))
        self._struct = cs
        return cs

    def jacobi_residual(self) -> float:
        """Sup norm of the frame Jacobi identity over the batch."""
        cs = self.structure_functions()
        worst = 0.0
        for i in range(4):
            for j in range(i + 1, 4):
                for k in range(j + 1, 4):
                    for m in range(4):
                        acc = 0.0
                        for (p, q, r) in ((i, j, k), (j, k, i), (k, i, j)):
                            acc = acc + jets.value_of(self.frame_derivative(p, cs[q][r][m]))
                            for l in range(4):
                                acc = acc + jets.value_of(cs[q][r][l] * cs[p][l][m])
                        worst = max(worst, float(np.max(np.abs(acc))))
        return worst


def structure_functions(chart: InvariantChart, x) -> np.ndarray:
    """Bracket coefficients c^k_ij at interior x, shape (4, 4, 4, n).

    Indexing: [e_i, e_j] = sum_k out[i, j, k] e_k.  Boundary or exterior x
    raises the chart's domain error.
    """
    pt = chart.at(x)
    cs = pt.structure_functions()
    out = np.empty((4, 4, 4) + pt.x.shape)
    for i in range(4):
        for j in range(4):
            for k in range(4):
                out[i, j, k] = np.broadcast_to(
                    np.asarray(jets.value_of(cs[i][j][k])), pt.x.shape)
    return out


class InvariantForm:
    """Invariant k-form given by frame components as jet-callables of x."""

    def __init__(self, degree: int, comps: dict):
        self.degree = degree
        self.comps = {}
        for idx, f in comps.items():
            key = tuple(int(i) for i in idx)
            if key not in MULTI_INDICES[degree]:
                raise ValueError(f"{key} is not an increasing degree-{degree} index")
            self.comps[key] = f

    def at(self, pt: FramePoint) -> KForm:
        seed = Jet.variable(pt.x, JET_ORDER)
        out = KForm(self.degree)
        for pos, idx in enumerate(MULTI_INDICES[self.degree]):
            f = self.comps.get(idx)
            if f is None:
                out.comps[pos] = Jet.constant(np.zeros_like(pt.x), JET_ORDER)
            else:
                v = f(seed)
                if not isinstance(v, Jet):
                    v = Jet.constant(v + np.zeros_like(pt.x), JET_ORDER)
                out.comps[pos] = v
        return out

    def scaled(self, s: float) -> "InvariantForm":
        return InvariantForm(self.degree,
                             {idx: (lambda x, f=f, s=s: s * f(x))
                              for idx, f in self.comps.items()})

    @staticmethod
    def zero(degree: int) -> "InvariantForm":
        return InvariantForm(degree, {})


# ---------------------------------------------------------------------------
# concrete charts
# ---------------------------------------------------------------------------


class BonneauFamily:
    """One-parameter family of U(2)-invariant metrics on S^4 over x in (-inf, k).

    The conformal factor is

        W(x) = 1 + n (x^2 - 1 - 2 k x)(pi/2 + arctan x) + n (x - 2k),
        n = 1 / (k + (1 + k^2)(pi/2 + arctan k)),

    which has a double root at x = k and tends to 1 at -infinity.  Both
    limits cancel catastrophically in the naive expression, so W is
    evaluated piecewise: a series form near x = k, an arctan(-1/x) form for
    large negative x, and the direct formula in between.
    """

    def __init__(self, k: float):
        self.k = float(k)
        if not math.isfinite(self.k):
            raise ChartError(f"parameter k must be finite, got {k}")
        pk = 0.5 * math.pi + math.atan(self.k)
        den = self.k + (1.0 + self.k * self.k) * pk
        if not math.isfinite(den) or den <= 0.0:
            raise ChartError(f"no admissible profile for k={k}: n denominator {den}")
        self.n = 1.0 / den
        self.pk = pk
        kk = 1.0 + self.k * self.k
        self.r_near = min(1.0, 0.5 * kk / max(abs(self.k), 1.0))
        self.x_far = min(-2.0, -4.0 * abs(self.k), self.k - 2.0 * self.r_near)

    # -- conformal factor ----------------------------------------------------

    def _w_direct(self, x: Jet) -> Jet:
        quad = x * x - 1.0 - (2.0 * self.k) * x
        p = 0.5 * math.pi + jets.arctan(x)
        return 1.0 + self.n * (quad * p) + self.n * (x - 2.0 * self.k)

    def _w_near(self, x: Jet) -> Jet:
        k, n = self.k, self.n
        kk = 1.0 + k * k
        t = k - x
        quad = x * x - 1.0 - (2.0 * k) * x
        u = (x - k) / (1.0 + k * x)
        # arctan x - arctan k - (x-k)/(1+k^2), all pieces O(t^2)
        dd = jets.arctan_minus_id(u) - (k / kk) * (t * t) / (1.0 + k * x)
        return n * (self.pk * (t * t) - (t * t * t) / kk + quad * dd)

    def _w_far(self, x: Jet) -> Jet:
        w = -1.0 / x
        quad = x * x - 1.0 - (2.0 * self.k) * x
        return 1.0 + self.n * (quad * jets.arctan_minus_id(w) - w)

    def omega2(self, x: Jet) -> Jet:
        if not isinstance(x, Jet):
            x = Jet.constant(np.asarray(x, dtype=float), JET_ORDER)
        xv = np.asarray(jets.value_of(x))
        near = (self.k - xv) <= self.r_near
        far = xv <= self.x_far
        x_near = jets.where(near, x, Jet.constant(self.k - self.r_near, x.order) + 0.0 * x)
        x_far = jets.where(far, x, Jet.constant(self.x_far, x.order) + 0.0 * x)
        mid_lo, mid_hi = self.x_far, self.k - 0.5 * self.r_near
        x_mid = jets.where(xv < mid_lo, Jet.constant(mid_lo, x.order) + 0.0 * x,
                           jets.where(xv > mid_hi, Jet.constant(mid_hi, x.order) + 0.0 * x, x))
        out = jets.where(near, self._w_near(x_near),
                         jets.where(far, self._w_far(x_far), self._w_direct(x_mid)))
        return out

    # -- metric profiles (homothety parameter fixed at 2) ---------------------

    def a(self, x: Jet) -> Jet:
        return jets.sqrt((self.k - x) / self.omega2(x)) / (1.0 + x * x)

    def b(self, x: Jet) -> Jet:
        return jets.sqrt((self.k - x) / (1.0 + x * x))

    def c(self, x: Jet) -> Jet:
        return jets.sqrt(self.omega2(x) / (self.k - x))

    def torsion_coefficient(self, x: Jet) -> Jet:
        """Frame component H_123 of the torsion 3-form; equals 2 c(x)."""
        return 2.0 * self.c(x)

    def a_over_c(self, x):
        """a/c with the vanishing factors cancelled: (k-x)/(W (1+x^2))."""
        return (self.k - x) / (self.omega2(x) * (1.0 + x * x))


def bonneau_chart(k: float, scan_nodes: int = 1024):
    """Chart and torsion 3-form of the S^4 family at parameter k.

    Runs a positivity scan of the conformal factor over the compactified
    domain and raises :class:`ChartError` naming the first violating x.
    """
    fam = BonneauFamily(k)
    chart = InvariantChart(
        name="bonneau",
        fa=fam.a, fb=fam.b, fc=fam.c,
        domain=Domain(-math.inf, k),
        structure_mode="su2",
        orbit_volume=ORBIT_VOLUME_SU2,
        params={"k": float(k)},
    )
    u = (np.arange(scan_nodes) + 0.5) / scan_nodes
    x, _ = chart.map_from_unit(u)
    w = np.asarray(jets.value_of(fam.omega2(Jet.variable(x, 2))))
    good = np.isfinite(w) & (w > 0.0)
    if not np.all(good):
        bad = x[~good]
        raise ChartError(
            f"conformal factor not positive for k={k}: W({bad[0]:.6g}) = "
            f"{w[~good][0]:.3e}")
    H = InvariantForm(3, {(0, 1, 2): fam.torsion_coefficient})
    return chart, H


def bonneau_torsion(chart: InvariantChart) -> InvariantForm:
    fam = BonneauFamily(chart.params["k"])
    return InvariantForm(3, {(0, 1, 2): fam.torsion_coefficient})


def round_s4_chart() -> InvariantChart:
    """Unit-curvature round S^4: a = 1, b = c = sin(x)/2 on (0, pi)."""
    return InvariantChart(
        name="round",
        fa=lambda x: Jet.constant(1.0, x.order) + 0.0 * x,
        fb=lambda x: jets.sin(x) * 0.5,
        fc=lambda x: jets.sin(x) * 0.5,
        domain=Domain(0.0, math.pi),
        structure_mode="su2",
        params={},
    )


def product_chart(b0: float = 1.0, L: float = 1.0) -> InvariantChart:
    """S^1 x S^3 with circle circumference L and orbit radius profile b0."""
    if b0 <= 0 or L <= 0:
        raise ChartError("b0 and L must be positive")
    return InvariantChart(
        name="product",
        fa=lambda x: Jet.constant(1.0, x.order) + 0.0 * x,
        fb=lambda x: Jet.constant(float(b0), x.order) + 0.0 * x,
        fc=lambda x: Jet.constant(float(b0), x.order) + 0.0 * x,
        domain=Domain(0.0, float(L), periodic=True),
        structure_mode="su2",
        params={"b0": float(b0), "L": float(L)},
    )


def flat_torsion(chart: InvariantChart, sign: int = +1) -> InvariantForm:
    """Torsion of the flat trivialization connection: H_234 = sign / b0."""
    b0 = chart.params["b0"]
    return InvariantForm(3, {(1, 2, 3): lambda x, v=sign / b0: Jet.constant(v, x.order) + 0.0 * x})


def flat_torus_chart(L: float = 1.0) -> InvariantChart:
    """Flat T^4: abelian orbits, unit profiles, all brackets zero."""
    return InvariantChart(
        name="flat",
        fa=lambda x: Jet.constant(1.0, x.order) + 0.0 * x,
        fb=lambda x: Jet.constant(1.0, x.order) + 0.0 * x,
        fc=lambda x: Jet.constant(1.0, x.order) + 0.0 * x,
        domain=Domain(0.0, float(L), periodic=True),
        structure_mode="abelian",
        orbit_volume=ORBIT_VOLUME_T3,
        params={"L": float(L)},
    )


def _trig_poly(rng, base: float, amp: float, nmodes: int = 3):
    coefs = amp * rng.uniform(-1.0, 1.0, size=(nmodes, 2))

    def f(x, coefs=coefs, base=base):
        out = Jet.constant(base, x.order) + 0.0 * x
        for m, (ca, cb) in enumerate(coefs, start=1):
            out = out + ca * jets.cos(m * x) + cb * jets.sin(m * x)
        return out

    return f


def random_chart(seed: int) -> InvariantChart:
    """Smooth random periodic chart on S^1 x SU(2), reproducible from seed."""
    rng = np.random.default_rng(int(seed))
    profs = [_trig_poly(rng, base=float(rng.uniform(1.2, 2.0)), amp=0.12) for _ in range(3)]
    return InvariantChart(
        name="random",
        fa=profs[0], fb=profs[1], fc=profs[2],
        domain=Domain(0.0, 2.0 * math.pi, periodic=True),
        structure_mode="su2",
        params={"seed": int(seed)},
    )


def random_torsion(seed: int, amp: float = 0.6) -> InvariantForm:
    """Random invariant torsion 3-form (all four frame components)."""
    rng = np.random.default_rng(int(seed) + 101)
    comps = {idx: _trig_poly(rng, base=float(rng.uniform(-0.4, 0.4)), amp=amp / 3.0)
             for idx in MULTI_INDICES[3]}
    return InvariantForm(3, comps)


def random_one_form(seed: int, amp: float = 0.6) -> InvariantForm:
    rng = np.random.default_rng(int(seed) + 202)
    comps = {idx: _trig_poly(rng, base=float(rng.uniform(-0.4, 0.4)), amp=amp / 3.0)
             for idx in MULTI_INDICES[1]}
    return InvariantForm(1, comps)


def chart_from_dict(d: dict) -> InvariantChart:
    """Rebuild a chart from its JSON descriptor."""
    t = d["type"]
    p = d.get("params", {})
    if t == "bonneau":
        return bonneau_chart(p["k"])[0]
    if t == "round":
        return round_s4_chart()
    if t == "product":
        return product_chart(p.get("b0", 1.0), p.get("L", 1.0))
    if t == "flat":
        return flat_torus_chart(p.get("L", 1.0))
    if t == "random":
        return random_chart(p.get("seed", 0))
    raise ChartError(f"unknown chart type {t!r}")
