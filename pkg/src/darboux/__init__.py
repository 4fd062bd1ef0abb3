"""Numerical tracing and analysis of Darboux curves on principal-chart surfaces.

Darboux curves are the surface curves whose osculating sphere is tangent to
the surface at every point; they satisfy k_n' + tau_g * k_g = 0 and behave
much like geodesics of the sphere congruence tangent to the surface.  The
package provides principal-chart surface models (confocal quadrics, canal
surfaces, cones, cylinders), the Darboux flow with conserved-quantity
monitoring, ridge classification, the Lorentz sphere-space model, and the
global level-set dynamics on quadrics.
"""

__version__ = "0.1.0"

from .catalog import (ConeSpec, CylinderSpec, RevolutionSpec, circular_cylinder,
                      cone_of_revolution, cylinder_of_revolution, elliptic_cylinder,
                      load_surface, sin_profile_surface, torus_surface, wavy_cone)
from .chart import (ChartError, Domain, DomainError, FrameScalars,
                    GenericChartSurface, PrincipalChartSurface,
                    UmbilicProximityError, codazzi_residuals,
                    conformal_fields_bracket_check, dilate, frame_scalars,
                    principal_curvatures, shape_operator_curvatures)
from .flow import (DarbouxState, FlowError, IntegratorParams, Trajectory,
                   darboux_field_arclength, darboux_field_desingularized,
                   darboux_residual, falpha_leaf, integrate, integrate_arclength,
                   integrate_geodesic, osculating_contact_residual,
                   plane_field_integrability, trace_batch)
from .integrals import (FirstIntegral, canal_integral, conservation_report,
                        quadric_integral_value, revolution_integral_value,
                        standard_integrals)
from .quadrics import QuadricAngleChart, QuadricChart, QuadricSpec, make_quadric
from .ridges import (GraphJet, RidgeRecord, classify_sigma, jet_classify,
                     jet_from_surface, ridge_locus, ridge_phase_portrait)

__all__ = [n for n in dir() if not n.startswith("_")]
