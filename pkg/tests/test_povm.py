from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectracert.errors import HypothesisNotVerified, ShapeMismatch
from spectracert.povm import (FinitePOVM, FinitePVM, conclude_equality_check, equality_bound,
                              hypothesis_holds, perturbed_povm, povm_sweep, random_pvm, validity)

P2 = FinitePVM([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


def test_hypothesis_examples():
    assert hypothesis_holds(P2, FinitePOVM(P2.P)).holds
    E1 = np.full((2, 2), 0.5)
    res = hypothesis_holds(P2, FinitePOVM([E1, np.eye(2) - E1]))
    assert not res.holds and res.witness == (1, 2)
    one = FinitePVM([np.eye(3)])
    assert hypothesis_holds(one, FinitePOVM([np.eye(3)])).holds


def test_validity_examples():
    assert validity(P2).valid
    bad = validity(FinitePOVM([2 * np.eye(2), -np.eye(2)]))
    assert not bad.valid and bad.violation == "positivity"
    short = validity(FinitePVM([np.diag([0.999, 0.0]), np.diag([0.0, 0.999])]))
    assert not short.valid and short.violation == "sum"
    skew = validity(FinitePVM([np.array([[1.0, 0.5], [0.0, 0.0]]), np.array([[0.0, -0.5], [0.0, 1.0]])]))
    assert not skew.valid and skew.violation == "symmetry"
    loose = validity(FinitePVM([np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), np.zeros((2, 2)) + 0.0]))
    assert loose.valid
    overlap = FinitePVM([np.eye(2), np.diag([1.0, 0.0]), -np.diag([1.0, 0.0])])
    assert validity(overlap).violation == "idempotence"
    sum_only = validity(FinitePOVM([np.diag([0.4995, 0.4995]), np.diag([0.4995, 0.4995])]))
    assert not sum_only.valid and sum_only.violation == "sum"


def test_equality_exact():
    res = conclude_equality_check(P2, FinitePOVM(P2.P))
    assert res.equal and res.max_deviation == 0.0


def test_refuses_without_hypothesis():
    E1 = np.full((2, 2), 0.5)
    with pytest.raises(HypothesisNotVerified):
        conclude_equality_check(P2, FinitePOVM([E1, np.eye(2) - E1]))


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        hypothesis_holds(P2, FinitePOVM([np.eye(3)]))


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.integers(0, 6), st.floats(-8, -4.5))
def test_implication(seed, N, extra, log_angle):
    rng = np.random.default_rng(seed)
    pvm = random_pvm(max(N, 2) + extra, N, rng)
    povm = perturbed_povm(pvm, 10 ** log_angle, rng)
    assert validity(pvm).valid and validity(povm).valid
    if hypothesis_holds(pvm, povm).holds:
        res = conclude_equality_check(pvm, povm)
        assert res.max_deviation <= res.bound


def test_square_root_scaling_is_needed():
    rng = np.random.default_rng(3)
    pvm = random_pvm(6, 3, rng)
    povm = perturbed_povm(pvm, 1e-5, rng)
    hyp = hypothesis_holds(pvm, povm)
    dev = max(np.linalg.norm(povm.E[j] - pvm.P[j], 2) for j in range(3))
    assert dev > 10 * (3 - 1) * hyp.residual
    assert dev <= equality_bound(3, hyp.residual, 1e-15)


def test_small_sweep():
    rep = povm_sweep(300, seed=1)
    assert rep.passed and rep.hypothesis_true > 250
    assert sorted(rep.tightness) == list(range(2, 9))
