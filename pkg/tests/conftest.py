import math

import numpy as np
import pytest

from darboux.catalog import (circular_cylinder, cone_of_revolution, cylinder_of_revolution,
                             elliptic_cylinder, sin_profile_surface, torus_surface, wavy_cone)
from darboux.flow import DarbouxState, IntegratorParams, integrate
from darboux.quadrics import QuadricSpec, make_quadric


@pytest.fixture(scope="session")
def ellipsoid():
    return make_quadric(QuadricSpec("ellipsoid", 3, 2, 1))


@pytest.fixture(scope="session")
def one_sheet():
    return make_quadric(QuadricSpec("one_sheet", 3, 2, -1))


@pytest.fixture(scope="session")
def two_sheet():
    return make_quadric(QuadricSpec("two_sheet", 3, -1, -2))


@pytest.fixture(scope="session")
def revolution():
    return sin_profile_surface()


@pytest.fixture(scope="session")
def torus():
    return torus_surface()


@pytest.fixture(scope="session")
def cyl_rev():
    return cylinder_of_revolution(2.0)


@pytest.fixture(scope="session")
def circ_cyl():
    return circular_cylinder(2.0)


@pytest.fixture(scope="session")
def ell_cyl():
    return elliptic_cylinder(2.0, 1.0)


@pytest.fixture(scope="session")
def cone():
    return cone_of_revolution(0.6)


@pytest.fixture(scope="session")
def wcone():
    return wavy_cone()


@pytest.fixture(scope="session")
def ell_trajectory(ellipsoid):
    """One well-resolved Darboux trajectory on the ellipsoid, reused across tests."""
    return integrate(ellipsoid.angle_chart, DarbouxState(1.2, 0.9, 0.6),
                     IntegratorParams(max_arc_length=8.0, rel_tol=1e-11, abs_tol=1e-13))


def interior_points(surface, n=4, pad=0.15):
    w = surface.scan_window()
    us = np.linspace(w.u_min, w.u_max, n + 2)[1:-1]
    vs = np.linspace(w.v_min + pad, w.v_max - pad, n + 2)[1:-1]
    return [(float(u), float(v)) for u in us for v in vs]
