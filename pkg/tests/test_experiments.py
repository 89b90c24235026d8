from fractions import Fraction

import numpy as np
import pytest

from conftest import Y_AXIS, curve, example_map
from jordancone.analysis import analyze_curve
from jordancone.cone.experiments import (
    cone_curve_homogeneity_check,
    linearization_suite,
    near_identity_jacobian,
    no_zero_probe,
    perturbation_experiment,
    random_homogeneous,
)
from jordancone.cone.frame import build_frame
from jordancone.cone.gate import gate
from jordancone.polynomial import PolyMap

F = Fraction


def framed(G, z, shift):
    fr = build_frame(G, z, analyze_curve(G, z).d, shift)
    return fr, gate(fr)


def test_random_homogeneous_degree():
    rng = np.random.default_rng(0)
    for terms in random_homogeneous(rng, 3, 2, 4):
        assert all(sum(e) == 4 for e in terms)


@pytest.mark.parametrize("kind", ["map", "curve"])
def test_perturbation_keeps_k_in_range(kind, G, z1):
    rng = np.random.default_rng(1)
    for _ in range(5):
        res = perturbation_experiment(G, z1, kind, F(1, 1000), rng=rng)
        assert res.ok, res.checks
        assert res.order <= res.k_after <= 3


def test_perturbation_at_zero_changes_nothing(G, z1):
    rng = np.random.default_rng(2)
    for kind in ("map", "curve", "joint"):
        res = perturbation_experiment(G, z1, kind, 0, rng=rng)
        assert res.k_after == res.k_before == 3 and res.ok


def test_joint_perturbation_keeps_gate():
    # the companion -x y^3 + x^5 passes the shift-0 gate along the y-axis
    G = PolyMap.from_terms(2, [{(1, 3): F(-1), (5, 0): F(1)}])
    rng = np.random.default_rng(4)
    for _ in range(5):
        res = perturbation_experiment(G, curve(Y_AXIS), "joint", F(1, 1000), rng=rng)
        assert res.gate_before.passed("corollary1")
        assert res.ok, res.checks


def test_perturbation_rejects_unknown_kind(G, z1):
    with pytest.raises(ValueError):
        perturbation_experiment(G, z1, "both", 1)


def test_homogeneity_preserves_k(G, z1, z2):
    fr, _ = framed(G, z1, 2)
    rep = cone_curve_homogeneity_check(fr, samples=3)
    assert rep.all_k and rep.approximation_preserved is not False
    fr2, _ = framed(example_map(F(1, 100)), z2, 2)
    rep2 = cone_curve_homogeneity_check(fr2, samples=2, zero_paths=True)
    assert rep2.all_k and rep2.approximation_preserved


def test_linearization_suite(G, z1):
    fr, _ = framed(G, z1, 2)
    rep = linearization_suite(fr, samples=10)
    assert rep.ok and rep.worst_ratio <= 1.0


def test_near_identity_jacobian(G, z1):
    fr, _ = framed(G, z1, 2)
    assert np.allclose(near_identity_jacobian(fr), np.eye(2), atol=1e-6)


def test_no_zero_probe(G, z1):
    fr, r = framed(G, z1, 0)
    assert r.no_zero_in_cone
    assert no_zero_probe(fr, r, points=200) > 0.1
