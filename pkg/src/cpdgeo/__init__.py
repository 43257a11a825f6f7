"""Numerical construction and verification of hypersurfaces that carry a
canonical principal direction relative to a closed conformal vector field.

Conventions used across the package:

* Frenet: T' = kappa eta, eta' = -kappa T (eta is T rotated by +90 deg).
* Mean curvature is the TRACE of the shape operator: the unit cylinder has
  H = 1 and the unit sphere H = 2.
* The profile sweep gamma + f eta + g X0 carries the unit normal
  g' eta - f' X0, in which the principal curvatures are f''/g' (profile
  direction) and g' kappa / (1 - f kappa) (base direction).
"""

from .config import DEFAULTS
from .construct import (GraphFunction, GraphSurface, ProfileSweepSurface,
                        ProjectionFrame, cpd_hypersurface, cpd_surface_r3,
                        gradient_relations, graph_in_warped_product,
                        projection_frame)
from .curves import (PlaneCurve, Plane, ProfileCurve, arclength_reparam,
                     arc_profile, circle_curve, ellipse_curve, frenet_frame,
                     line_curve, vertical_profile)
from .cmc import (ProfileSolution, bochner_residual, catenary_profile,
                  classify_profile, cmc_profile_ode, dichotomy_check,
                  graph_mean_curvature, mean_curvature_at,
                  slice_curvature_check)
from .derivatives import numerical_derivative
from .errors import (CpdGeoError, CutLocusError, DegenerateCurveError,
                     DomainError, ExpressionError, FocalSetError,
                     ImmersionDegeneracyError, InconsistentDataError,
                     MeshExportError, OutsideTubeError, SceneError,
                     SingularIntegrandError, TransversalityError,
                     ZeroFieldError)
from .fields import ConformalField, WarpedProduct
from .immersion import (EUCLIDEAN, ParametricImmersion, ShapeData,
                        fundamental_forms, shape_data)
from .objio import export_obj
from .polyline import BACKEND, Polyline, available_backends, circle_polyline
from .transnormal import (CircleBase, LineBase, MonotoneMapPair,
                          TransnormalSpec, eikonal_residual, h_from_b,
                          level_set_extract, signed_distance,
                          transnormal_from_distance)
from .verify import (ReportEntry, ResidualReport, VerifyConfig,
                     check_angle_constancy, check_gradient_norm_on_levels,
                     check_principal_direction, check_T_geodesic,
                     theorem_report)

__version__ = "0.1.0"
