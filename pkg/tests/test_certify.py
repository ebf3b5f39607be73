from __future__ import annotations

import numpy as np
import pytest

from spectracert.certify import (PairConfig, audit_certificate, certify_pair, certify_separation,
                                 epsilon_cover)
from spectracert.errors import CoverFailure, InvalidPair, PreconditionError
from spectracert.io import load_example, plain
from spectracert.sections import build_gamma

DISK = load_example("disk")
SECTION = build_gamma(DISK, [1, 0], [-1, 0], radius=1.0, grid=64)


def test_cover_requires_positive_tolerance():
    with pytest.raises(CoverFailure):
        epsilon_cover(SECTION, 0.0)


def test_cover_partitions_grid():
    cov = epsilon_cover(SECTION, 0.05)
    cells = sorted(i for c in cov.cells for i in c)
    assert cells == list(range(SECTION.grid.shape[0]))
    assert max(cov.sup_diag) <= 0.05


def test_large_tolerance_single_node():
    assert epsilon_cover(SECTION, 10.0).n == 1


def test_cover_grows_as_tolerance_shrinks():
    sizes = [epsilon_cover(SECTION, e).n for e in (0.2, 0.05, 0.01)]
    assert sizes == sorted(sizes)


@pytest.fixture(scope="module")
def disk_cert():
    return certify_separation(SECTION, [-1, 0], 0.05, M=128)


def test_disk_certificate(disk_cert):
    cert = disk_cert
    assert cert.verified
    assert 0 < cert.s < 1 and np.isfinite(cert.constant)
    assert cert.constant == pytest.approx(1.0 / (cert.alpha * (1 - cert.s)))
    assert np.all(cert.domination_slacks >= 0)
    assert cert.samples.shape[0] >= 128
    for z in cert.samples:
        assert np.linalg.norm(z - cert.y) <= cert.U_radius * (1 + 1e-12)
    names = [i.name for i in cert.log]
    assert names.index("cover.sup_diag[0]") < names.index("perron.product_lower") < names.index("domination.U_cap_K")


def test_certificate_independent_of_cover_tolerance(disk_cert):
    small = certify_separation(SECTION, [-1, 0], 0.01, M=128)
    assert small.verified and small.n >= disk_cert.n
    assert small.constant == pytest.approx(disk_cert.constant)


def test_audit_round_trip(disk_cert):
    payload = plain(disk_cert.to_dict(full=True))
    assert audit_certificate(DISK, payload).passed


def test_audit_detects_tampering(disk_cert):
    payload = plain(disk_cert.to_dict(full=True))
    payload["s"] = 0.999999
    assert not audit_certificate(DISK, payload).passed


def test_target_in_section_rejected():
    ks = build_gamma(DISK, [1, 0], [-1, 0], radius=1.0, grid=16)
    with pytest.raises(PreconditionError):
        certify_separation(ks, [-1, 0.0001], 0.05)
    near = build_gamma(DISK, [1, 0], [0.5, np.sqrt(3) / 2], radius=1.0, grid=16)
    with pytest.raises(PreconditionError):
        certify_separation(near, None, 0.05)


def test_square_corner_scalar_pipeline():
    S = load_example("square")
    ks = build_gamma(S, [1, 1], [-1, -1])
    cert = certify_separation(ks, [-1, -1], 0.05, M=64)
    assert cert.verified and cert.n == 1 and cert.B.shape == (1, 1)


def test_pair_disk():
    pc = certify_pair(DISK, [1, 0], [-1, 0], PairConfig(samples=64))
    assert pc.verified and pc.strata == [1]
    assert pc.to_dict()["ball_gap"] > 0


def test_pair_square():
    pc = certify_pair(load_example("square"), [1, 1], [-1, -1], PairConfig(samples=64))
    assert pc.verified and pc.strata == [1, 2]
    kinds = {(e["stratum"], e["kind"]) for e in pc.entries}
    assert (2, "certificate") in kinds and (1, "exclusion") in kinds


def test_pair_rejects_equal_points():
    with pytest.raises(InvalidPair):
        certify_pair(DISK, [1, 0], [1, 0])
