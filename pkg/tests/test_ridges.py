import math

import numpy as np
import pytest

from darboux.chart import Domain, GenericChartSurface
from darboux.ridges import (GraphJet, RidgeRecord, classify_sigma,
                            equilibrium_eigenvalues, graph_frame_product,
                            jet_classify, jet_from_surface, revolution_vertex_roots,
                            ridge_locus, ridge_locus_tangent, ridge_phase_portrait)

EXPECTED_QUADRIC_RIDGES = {
    # (kind, foliation, section angle mod 2pi) -> classification
    ("ellipsoid", "P1", 0.0): "beak_to_beak",      # y = 0 section, k1 branch
    ("ellipsoid", "P1", math.pi): "zigzag",        # x = 0 section
    ("ellipsoid", "P2", 0.0): "zigzag",            # z = 0 section
    ("ellipsoid", "P2", math.pi): "beak_to_beak",  # y = 0 section, k2 branch
    ("one_sheet", "P1", 0.0): "zigzag",
    ("one_sheet", "P1", math.pi): "beak_to_beak",
    ("one_sheet", "P2", 0.0): "zigzag",
    ("two_sheet", "P1", 0.0): "beak_to_beak",
    ("two_sheet", "P1", math.pi): "zigzag",
    ("two_sheet", "P2", 0.0): "beak_to_beak",
}


def _section_angle(rec, foliation, v_is_angle):
    coord = rec.u if foliation == "P1" else rec.v
    if foliation == "P2" and not v_is_angle:
        return 0.0 if abs(coord) < 1e-6 else None
    c = coord % (2 * math.pi)
    if min(c, 2 * math.pi - c) < 1e-6:
        return 0.0
    if abs(c - math.pi) < 1e-6:
        return math.pi
    return None


def test_revolution_ridge_scan(revolution):
    scan = ridge_locus(revolution, "P1", resolution=6)
    assert scan.status == "ok"
    roots = sorted({r.u % (2 * math.pi) for r in scan.records})
    assert abs(roots[0] - math.pi / 2) < 1e-10
    assert abs(roots[-1] - 3 * math.pi / 2) < 1e-10
    kinds = {round(r.u % (2 * math.pi), 4): r.kind for r in scan.records}
    assert kinds[round(math.pi / 2, 4)] == "beak_to_beak"
    assert kinds[round(3 * math.pi / 2, 4)] == "zigzag"


def test_revolution_shortcut_sign(revolution):
    # orientation k2 > k1 here: positive slope of the ridge function at the
    # root means beak-to-beak, negative means zigzag
    h = 1e-6
    for u0, kind in ((math.pi / 2, "beak_to_beak"), (3 * math.pi / 2, "zigzag")):
        slope = (revolution.ridge_function(u0 + h) - revolution.ridge_function(u0 - h)) / (2 * h)
        rec = classify_sigma(revolution, u0, 0.0, "P1")
        assert rec.kind == kind
        assert (slope > 0) == (rec.kind == "beak_to_beak")


def test_identically_critical_scans(revolution, cyl_rev):
    assert ridge_locus(revolution, "P2", resolution=4).status == "identically_critical"
    assert ridge_locus(cyl_rev, "P1", resolution=4).status == "identically_critical"


def test_vertex_ridge_correspondence(revolution):
    verts = revolution_vertex_roots(revolution, 0.1, 2 * math.pi)
    ridges = sorted({r.u for r in ridge_locus(revolution, "P1", resolution=4).records
                     if 0.1 < r.u < 2 * math.pi})
    assert len(verts) == len(ridges) == 2
    for rv, ru in zip(sorted(verts), ridges):
        assert abs(rv - ru) < 1e-8


def test_quadric_ridge_catalog(ellipsoid, one_sheet, two_sheet):
    surfs = {"ellipsoid": ellipsoid, "one_sheet": one_sheet, "two_sheet": two_sheet}
    found = {}
    for kind, surf in surfs.items():
        A = surf.angle_chart
        for fol in ("P1", "P2"):
            scan = ridge_locus(A, fol, resolution=5)
            for rec in scan.records:
                ang = _section_angle(rec, fol, A.v_is_angle)
                assert ang is not None, (kind, fol, rec)
                key = (kind, fol, ang)
                found.setdefault(key, set()).add(rec.kind)
    assert set(found) == set(EXPECTED_QUADRIC_RIDGES)
    for key, kinds in found.items():
        assert kinds == {EXPECTED_QUADRIC_RIDGES[key]}, key


def test_sigma_closed_form_at_corner(ellipsoid):
    # the y = 0 ridge of the k1 family through (sqrt(3), 0, 0)
    rec = classify_sigma(ellipsoid.angle_chart, 0.0, 0.0, "P1")
    assert abs(rec.sigma - 0.75) < 1e-12
    assert rec.kind == "beak_to_beak"
    assert abs(graph_frame_product(ellipsoid.angle_chart, rec) + 9.0 / 16.0) < 1e-12
    lam2, lam3 = rec.eigenvalues
    assert abs(lam2 * lam3 + rec.sigma / 3.0) < 1e-15


def test_eigenvalue_identity_all_ridges(ellipsoid, one_sheet, two_sheet, revolution):
    for surf in (ellipsoid.angle_chart, one_sheet.angle_chart,
                 two_sheet.angle_chart, revolution):
        for fol in ("P1", "P2"):
            scan = ridge_locus(surf, fol, resolution=3)
            for rec in scan.records:
                if rec.kind == "degenerate":
                    continue
                lam2, lam3 = rec.eigenvalues
                assert abs(lam2 * lam3 + rec.sigma / 3.0) < 1e-10
                lam = equilibrium_eigenvalues(surf, rec)
                pair_real = max(abs(lam[1].imag), abs(lam[2].imag)) \
                    < 1e-4 * max(abs(lam[1]), 1e-12)
                assert pair_real == (rec.kind == "beak_to_beak")


def test_ridge_transversality(ellipsoid, revolution):
    for surf, fol, rec_pick in ((ellipsoid.angle_chart, "P1", 0),
                                (revolution, "P1", 0)):
        rec = ridge_locus(surf, fol, resolution=3).records[rec_pick]
        t = ridge_locus_tangent(surf, rec)
        assert abs(t[1]) > 1e-3   # locus transversal to the P1 curves


def test_degenerate_band():
    # manufactured chart: k1 has a cubic critical point, sigma = 0
    surf = GenericChartSurface(
        Domain(-1.0, 1.0, -1.0, 1.0),
        E=lambda u, v: 1.0 + 0.0 * np.asarray(u),
        G=lambda u, v: 1.0 + 0.0 * np.asarray(u),
        e=lambda u, v: 0.5 + np.asarray(u) ** 3,
        g=lambda u, v: 2.0 + 0.0 * np.asarray(u),
        embedding=lambda u, v: np.array([u, v, 0.0]))
    surf.dk1_du = lambda u, v: 3.0 * np.asarray(u) ** 2
    surf.d2k1_du2 = lambda u, v: 6.0 * np.asarray(u)
    rec = classify_sigma(surf, 0.0, 0.0, "P1")
    assert rec.kind == "degenerate"


def test_jet_classify_ellipsoid_closed_form():
    # quartic graph data of ellipsoid(3,2,1) at (-sqrt(3), 0, 0)
    s3 = math.sqrt(3.0)
    jet = GraphJet(k1=s3 / 2, k2=s3, a=0.0, b=0.0, c=0.0, d=0.0,
                   A=3 * s3 / 4, B=0.0, C=s3 / 2, D=0.0, E=3 * s3)
    out = jet_classify(jet)
    assert out["is_ridge_P1"] and out["is_ridge_P2"]
    assert abs(out["sigma1"] - 0.75) < 1e-12
    assert abs(out["sigma2"] + 12.0) < 1e-12   # the z = 0 section: zigzag


def test_jet_symmetric_reduction():
    jet = GraphJet(k1=1.0, k2=2.0, a=0.0, b=0.0, c=0.0, d=0.0,
                   A=5.0, B=0.0, C=0.0, D=0.0, E=30.0)
    out = jet_classify(jet)
    assert abs(out["sigma1"] - (5.0 - 3.0) / (1.0 - 2.0)) < 1e-14
    assert abs(out["sigma2"] - (30.0 - 24.0) / (2.0 - 1.0)) < 1e-14
    with pytest.raises(ValueError):
        jet_classify(GraphJet(1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0))


def test_jet_extraction_cross_check(ellipsoid, revolution):
    # fitted graph jets reproduce the chart sigma at mirror-symmetric ridge
    # points (vanishing mixed cubic coefficient, so graph and principal-chart
    # sigma coincide)
    A = ellipsoid.angle_chart
    for surf, (u0, v0), fol in ((A, (0.0, 0.0), "P1"),
                                (revolution, (math.pi / 2, 0.0), "P1")):
        rec = classify_sigma(surf, u0, v0, fol)
        jet = jet_from_surface(surf, u0, v0)
        out = jet_classify(jet, ridge_tol=1e-6)
        k1c = float(surf.k1(u0, v0))
        k2c = float(surf.k2(u0, v0))
        # the jet frame labels curvatures by its own axes; match to chart roles
        if abs(jet.k1 - k1c) < abs(jet.k1 - k2c):
            sigma_fit, mixed = out["sigma1"], jet.d
            assert abs(jet.k1 - k1c) < 1e-6 and abs(jet.k2 - k2c) < 1e-6
        else:
            sigma_fit, mixed = out["sigma2"], jet.b
            assert abs(jet.k1 - k2c) < 1e-6 and abs(jet.k2 - k1c) < 1e-6
        assert abs(mixed) < 1e-6
        assert abs(sigma_fit - rec.sigma) < 1e-6


def test_jet_invariant_correction_off_symmetry(ellipsoid):
    # at asymmetric ridge points the graph sigma differs from the chart sigma
    # by d^2/(k1-k2)^2: the invariant-corrected value recovers it
    A = ellipsoid.angle_chart
    rec = classify_sigma(A, 0.0, 0.9, "P1")
    jet = jet_from_surface(A, 0.0, 0.9)
    out = jet_classify(jet, ridge_tol=1e-5)
    assert abs(out["sigma1"] - rec.sigma) > 0.1          # straight-axis value differs
    assert abs(out["sigma1_invariant"] - rec.sigma) < 5e-3 * abs(rec.sigma)


def test_phase_portraits_agree_with_sigma(ellipsoid, one_sheet, two_sheet, revolution):
    surfs = {"ellipsoid": ellipsoid.angle_chart, "one_sheet": one_sheet.angle_chart,
             "two_sheet": two_sheet.angle_chart}
    for kind, A in surfs.items():
        for fol in ("P1", "P2"):
            seen = set()
            for rec in ridge_locus(A, fol, resolution=3).records:
                ang = _section_angle(rec, fol, A.v_is_angle)
                if ang in seen or ang is None:
                    continue
                seen.add(ang)
                por = ridge_phase_portrait(A, rec, n_orbits=8)
                assert por.kind == rec.kind, (kind, fol, ang, por)
    for rec in ridge_locus(revolution, "P1", resolution=2).records[:2]:
        por = ridge_phase_portrait(revolution, rec, n_orbits=8)
        assert por.kind == rec.kind
