from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectracert.errors import AmbiguousKernelDim, NotOnBoundary
from spectracert.io import load_example
from spectracert.pencil import membership
from spectracert.sampling import ball_points, sample_boundary
from spectracert.strata import (detect_full_kernel_singleton, in_closed_stratum,
                                kernel_dim_from_spectrum, kernel_dimension,
                                locally_closed_witness, stratify_samples)

from conftest import circle


@pytest.mark.parametrize("name, z, i", [("disk", (1, 0), 1), ("square", (1, 1), 2), ("square", (1, 0), 1)])
def test_kernel_dimension_examples(name, z, i):
    assert kernel_dimension(load_example(name), z) == i


def test_interior_point_rejected(disk):
    with pytest.raises(NotOnBoundary):
        kernel_dimension(disk, [0, 0])


def test_gap_guard():
    tau = 1e-9
    assert kernel_dim_from_spectrum(np.array([0.0, 0.0, 1.0]), tau) == 2
    with pytest.raises(AmbiguousKernelDim):
        kernel_dim_from_spectrum(np.array([0.0, 5e-9, 1.0]), tau)


def test_circle_all_stratum_one(disk):
    pts = [circle(t) for t in np.linspace(0, 2 * np.pi, 360, endpoint=False)]
    assert {r.stratum for r in stratify_samples(disk, pts)} == {1}


def test_square_corners_and_midpoints(square):
    corners = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    mids = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    recs = stratify_samples(square, corners + mids)
    assert [r.stratum for r in recs] == [2] * 4 + [1] * 4


def test_empty_list(disk):
    assert stratify_samples(disk, []) == []


def test_stratify_reports_index(disk):
    with pytest.raises(NotOnBoundary) as err:
        stratify_samples(disk, [circle(0.0), np.zeros(2)])
    assert err.value.details["index"] == 1


@pytest.mark.parametrize("name", ["disk", "square", "ball3", "interval"])
def test_partition_and_monotone_chain(name):
    p = load_example(name)
    pts = sample_boundary(p, 64, seed=3)
    recs = stratify_samples(p, pts)
    assert len(recs) == len(pts)
    for j in range(1, p.m + 1):
        upper = {n for n, z in enumerate(pts) if in_closed_stratum(p, z, j + 1)}
        lower = {n for n, z in enumerate(pts) if in_closed_stratum(p, z, j)}
        assert upper <= lower
        assert lower == {n for n, r in enumerate(recs) if r.stratum >= j}


def test_witness_disk(disk):
    w = locally_closed_witness(disk, [1, 0])
    assert w.epsilon == 1.0 and w.certified and w.stratum == 1


def test_witness_square_edge_near_corner(square):
    w = locally_closed_witness(square, [1, 0])
    assert w.epsilon == 0.5
    close = locally_closed_witness(square, [1, 0.999])
    assert close.epsilon == 2.0 ** -10 and not close.certified


def test_witness_corner(square):
    assert locally_closed_witness(square, [1, 1]).epsilon == 1.0


@pytest.mark.parametrize("name, x", [("disk", (1, 0)), ("square", (1, 0)), ("square", (0.4, -1))])
def test_witness_ball_lies_in_piece(name, x):
    p = load_example(name)
    w = locally_closed_witness(p, x)
    pts = sample_boundary(p, 400, seed=1)
    near = [z for z in pts if np.linalg.norm(z - w.center) <= w.neighborhood_radius]
    for z in near:
        if kernel_dimension(p, z) == w.stratum:
            assert w.contains(p, z)
    # no point of a higher stratum inside the witness ball
    for z in ball_points(w.center, w.epsilon, 200, seed=2):
        if membership(p, z).status.value == "boundary":
            assert kernel_dimension(p, z) <= w.stratum


def test_full_kernel_singleton():
    assert np.allclose(detect_full_kernel_singleton(load_example("singleton")), [0, 0], atol=1e-12)
    assert detect_full_kernel_singleton(load_example("disk")) is None
    assert detect_full_kernel_singleton(load_example("square")) is None


@given(st.floats(0, 2 * np.pi))
def test_stratum_of_circle_points(theta):
    assert kernel_dimension(load_example("disk"), circle(theta)) == 1
