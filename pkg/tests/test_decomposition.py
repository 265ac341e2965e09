"""Operator blocks, closed-formula reconstruction, Einstein residuals."""

import math

import numpy as np
import pytest

from skewtorsion import jets
from skewtorsion.charts import (
    InvariantChart, InvariantForm, bonneau_chart, random_chart,
    random_torsion, round_s4_chart, Domain,
)
from skewtorsion.decomposition import (
    decompose, einstein_residual, z_nabla_check,
)
from skewtorsion.jets import Jet


def test_round_sphere_blocks_are_identity():
    rep = decompose(round_s4_chart(), InvariantForm.zero(3), nodes=16)
    assert np.max(np.abs(rep.A - np.eye(3)[..., None])) < 1e-12
    assert np.max(np.abs(rep.D - np.eye(3)[..., None])) < 1e-12
    assert np.max(np.abs(rep.B)) < 1e-12
    assert np.max(np.abs(rep.C)) < 1e-12
    assert np.max(np.abs(rep.s_nabla - 12.0)) < 1e-12
    assert np.max(np.abs(rep.Wplus)) < 1e-12
    assert np.max(np.abs(rep.Wminus)) < 1e-12


@pytest.mark.parametrize("seed", range(6))
def test_reconstruction_matches_direct_blocks(seed):
    chart = random_chart(seed)
    H = random_torsion(seed)
    rep = decompose(chart, H, nodes=32)
    assert rep.reconstruction_residual <= 1e-9


def test_block_isometry_scale(seed=4):
    rep = decompose(random_chart(seed), random_torsion(seed), nodes=32)
    assert rep.block_residual <= 1e-12


@pytest.mark.parametrize("k", [-1.0, 0.0, 0.5, 1.0])
def test_bonneau_is_einstein_with_skew_torsion(k):
    chart, H = bonneau_chart(k)
    rep = decompose(chart, H, nodes=64)
    assert rep.einstein_residual <= 1e-8
    assert np.max(np.abs(rep.B)) <= 1e-8
    assert np.max(np.abs(rep.C)) <= 1e-8
    assert einstein_residual(chart, H.scaled(-1.0), nodes=64) <= 1e-8


def test_perturbed_round_profile_is_detected():
    chart = InvariantChart(
        name="random",
        fa=lambda x: Jet.constant(1.0, x.order) + 0.0 * x,
        fb=lambda x: jets.sin(x) * 0.5 * (1.0 + 0.05 * jets.sin(2.0 * x)),
        fc=lambda x: jets.sin(x) * 0.5,
        domain=Domain(0.0, math.pi),
        params={"seed": -1},
    )
    assert einstein_residual(chart, InvariantForm.zero(3), nodes=64) > 1e-3


def test_z_nabla_for_bonneau_and_shift_identity():
    chart, H = bonneau_chart(0.0)
    res = z_nabla_check(chart, H, nodes=64)
    assert res["sup_Z_nabla"] <= 1e-8
    assert res["shift_residual"] <= 1e-9
    # for H = 0 the two trace-free tensors coincide
    chart2 = random_chart(3)
    res2 = z_nabla_check(chart2, InvariantForm.zero(3), nodes=16)
    assert res2["shift_residual"] <= 1e-12


def test_z_nabla_shift_on_random_data():
    res = z_nabla_check(random_chart(8), random_torsion(8), nodes=32)
    assert res["shift_residual"] <= 1e-9


def test_closed_torsion_block_symmetry_after_removing_codifferential_part():
    chart, H = bonneau_chart(0.5)
    rep = decompose(chart, H, nodes=32)
    from skewtorsion.frame import _EPS3
    phi_op = -np.sqrt(2.0) * np.einsum("pqr,r...->pq...", _EPS3, rep.dstarH_plus)
    psi_op = -np.sqrt(2.0) * np.einsum("pqr,r...->pq...", _EPS3, rep.dstarH_minus)
    A_sym = rep.A - 0.25 * phi_op
    D_sym = rep.D + 0.25 * psi_op
    assert np.max(np.abs(A_sym - np.einsum("pq...->qp...", A_sym))) <= 1e-10
    assert np.max(np.abs(D_sym - np.einsum("pq...->qp...", D_sym))) <= 1e-10


def test_trace_of_a_block():
    chart = random_chart(5)
    H = random_torsion(5)
    rep = decompose(chart, H, nodes=32)
    tr = np.einsum("pp...->...", rep.A)
    assert np.max(np.abs(tr - 3.0 * (rep.s_nabla / 12.0 - rep.star_dH / 4.0))) <= 1e-9
    trd = np.einsum("pp...->...", rep.D)
    assert np.max(np.abs(trd - 3.0 * (rep.s_nabla / 12.0 + rep.star_dH / 4.0))) <= 1e-9


def test_einstein_tensor_is_trace_free():
    rep = decompose(random_chart(6), random_torsion(6), nodes=16)
    tr = np.einsum("ii...->...", rep.einstein_tensor)
    assert np.max(np.abs(tr)) <= 1e-12


def test_einstein_residual_stable_under_grid_refinement():
    chart, H = bonneau_chart(0.0)
    vals = [einstein_residual(chart, H, nodes=n) for n in (32, 64, 128, 256)]
    assert all(v <= 1e-8 for v in vals)


def test_weyl_blocks_are_torsion_independent():
    chart = random_chart(7)
    rep0 = decompose(chart, InvariantForm.zero(3), nodes=16)
    rep1 = decompose(chart, random_torsion(7), nodes=16)
    assert np.max(np.abs(rep0.Wplus - rep1.Wplus)) <= 1e-10
    assert np.max(np.abs(rep0.Wminus - rep1.Wminus)) <= 1e-10


def test_per_node_norms_serializable():
    import json
    chart, H = bonneau_chart(0.0)
    rep = decompose(chart, H, nodes=16)
    d = rep.per_node_norms()
    json.dumps(d)
    assert len(d["x"]) == 16
    assert max(d["einstein_tensor"]) <= 1e-8
    assert min(d["s_nabla"]) > 0
