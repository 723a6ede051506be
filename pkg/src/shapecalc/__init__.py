"""Shape-derivative calculus on curves and surfaces.

Closed-form first variations of geometric functionals (length, area,
bending energy, cracked-set energies) cross-checked against an independent
finite-difference oracle built on velocity-field flows, plus structure
suites that exercise what those derivatives must satisfy: tangential
nullity, locality, normal-dependence decomposition, and crack endpoint
coefficients.
"""

from .errors import (ConfigError, CrackNotInterior, DegenerateFrame,
                     DegenerateImmersion, IllConditioned, InvariantViolation,
                     NoBoundary, NoConvergence, NonFinite, NotArcLength,
                     ProbeOverlap, ShapecalcError, SupportViolation)
from .geometry import (FrenetFrame, ParamCurve, ParamSurface,
                       boundary_outward_normal, curvature,
                       curve_curvature_derivs, curve_frame,
                       distance_to_manifold, integrate_curve,
                       integrate_surface, nearest_curve_param,
                       nearest_surface_param, surface_mean_curvature,
                       surface_normal)
from .fields import (AmbientField, Ball, FieldSplit, TangencyReport,
                     bump_field, bump_profile, check_tangency,
                     default_holdall, fd_jacobian, project_normal,
                     restriction_field, smooth_step, split_field, sum_field)
from .flow import (FlowConfig, flow_manifold, flow_point, flow_with_jacobian,
                   invariance_residual)
from .functionals import (CrackFunctional, ShapeFunctional, analytic_darea,
                          analytic_delastic, analytic_dlength,
                          area_functional, bending_energy, crack_functional,
                          elastic_energy, elastic_functional, length,
                          length_functional, surface_area)
from .derivative import (DerivativeReport, FDConfig, FDTrace, compare,
                         eulerian_fd, fd_quotients)
from .validation import (CrackCoefficients, LocalityPair,
                         StructureSuiteResult, SuiteCase, crack_suite,
                         extract_crack_coefficients,
                         length_density_quadrature, locality_pairs,
                         locality_suite, normal_dependence_suite,
                         nullity_negative_field, tangential_nullity_suite,
                         tangential_probe_fields)
from .catalog import (FIELD_KINDS, FUNCTIONAL_KINDS, SHAPE_KINDS, ParsedField,
                      ParsedFunctional, build_field, build_shape, compatible,
                      parse_field, parse_functional)
from .report_io import (comparison_record, comparisons_csv, dumps_canonical,
                        load_report, plot_csv, report_document, suite_record,
                        suites_csv, write_json, write_text)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
