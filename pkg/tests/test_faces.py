from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectracert.errors import PreconditionError
from spectracert.faces import (closedness_heuristic, extreme_oracle_geometric,
                               face_direction_space, is_extreme, kernel_projection,
                               walk_to_extreme)
from spectracert.io import load_example
from spectracert.pencil import membership

from conftest import circle


def test_projection_examples(disk, square):
    assert np.allclose(kernel_projection(disk, [1, 0]), [[0, 0], [0, 1]], atol=1e-15)
    assert np.allclose(kernel_projection(square, [1, 1]), np.diag([0, 1, 0, 1]), atol=1e-15)


@given(st.floats(0, 2 * np.pi))
def test_disk_projection_closed_form(theta):
    v = np.array([-np.sin(theta / 2), np.cos(theta / 2)])
    P = kernel_projection(load_example("disk"), circle(theta))
    assert np.abs(P - np.outer(v, v)).max() <= 1e-12
    assert np.abs(P @ P - P).max() <= 1e-12 and np.array_equal(P, P.T)


def test_projection_at_sixty_degrees(disk):
    v = np.array([-np.sin(np.pi / 6), np.cos(np.pi / 6)])
    assert np.abs(kernel_projection(disk, circle(np.pi / 3)) - np.outer(v, v)).max() < 1e-12


def test_face_direction_examples(disk, square):
    assert face_direction_space(disk, [1, 0]).is_singleton
    assert face_direction_space(square, [1, 1]).is_singleton
    edge = face_direction_space(square, [1, 0])
    assert edge.dim == 1 and np.allclose(np.abs(edge.directions[:, 0]), [0, 1])


def test_is_extreme_examples(disk, square):
    assert not is_extreme(disk, [0, 0])
    for t in np.linspace(0, 2 * np.pi, 100, endpoint=False):
        assert is_extreme(disk, circle(t))
    assert not is_extreme(square, [1, 0])
    assert is_extreme(square, [1, 1])
    with pytest.raises(PreconditionError):
        is_extreme(disk, [2, 0])


def test_oracle_examples(disk, square):
    edge = extreme_oracle_geometric(square, [1, 0])
    assert not edge.is_extreme and np.allclose(np.abs(edge.witness), [0, 1])
    assert extreme_oracle_geometric(disk, [1, 0]).is_extreme
    assert extreme_oracle_geometric(square, [1, 1]).is_extreme


def test_oracle_without_face_directions(square):
    v = extreme_oracle_geometric(square, [1, 0.3], use_face_directions=False)
    assert not v.is_extreme


@pytest.mark.parametrize("start", [(1, 0.2), (-0.3, 1), (-1, -0.7), (0.9, -1)])
def test_walk_reaches_corners(square, start):
    ends = {tuple(np.round(walk_to_extreme(square, start, sign=s), 6)) for s in (1.0, -1.0)}
    assert len(ends) == 2
    for e in ends:
        assert is_extreme(square, e) and np.allclose(np.abs(e), 1.0)


def test_walk_segment_endpoints(segment):
    ends = sorted(tuple(np.round(walk_to_extreme(segment, [0.2, 0.0], sign=s), 6)) for s in (1, -1))
    assert ends == [(-1.0, 0.0), (1.0, 0.0)]


def test_singleton_extreme(singleton):
    assert is_extreme(singleton, [0, 0])


def _in_face(p, P, z, tau):
    return np.linalg.norm(P @ p.evaluate(z) @ P, 2) <= tau


@pytest.mark.parametrize("name, x", [("disk", (1, 0)), ("square", (1, 1)), ("disk", (0, -1))])
def test_extreme_face_is_singleton_on_grid(name, x):
    p = load_example(name)
    P = kernel_projection(p, x)
    g = np.linspace(-1, 1, 81)
    tau = 1e-9
    for a in g:
        for b in g:
            z = np.array([a, b])
            if membership(p, z).in_K and _in_face(p, P, z, tau):
                assert np.linalg.norm(z - np.asarray(x)) <= 10 * tau


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.01, 0.99))
def test_face_property_square_edge(a1, b1, a2, b2, s):
    p = load_example("square")
    P = kernel_projection(p, [1, 0])
    z1, z2 = np.array([a1, b1]), np.array([a2, b2])
    mid = s * z1 + (1 - s) * z2
    if _in_face(p, P, mid, 1e-9):
        assert _in_face(p, P, z1, 1e-8) and _in_face(p, P, z2, 1e-8)


def test_closedness_heuristic():
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [-0.1, 0.0], [5.0, 5.0]])
    rep = closedness_heuristic(pts, [False, True, True, False])
    assert rep.label == "HEURISTIC"
    assert rep.status == "suspect" and rep.suspects == [0]
    ok = closedness_heuristic(pts, [True, True, True, True])
    assert ok.status == "consistent"
