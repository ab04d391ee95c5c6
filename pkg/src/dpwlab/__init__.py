"""Loop-group construction of CMC surfaces in S^3 and spin-bundle tools on genus-2 curves."""

from dpwlab.loops import MatrixLoop, loop_mul, loop_eval, loop_star, loop_norm, random_loop
from dpwlab.iwasawa import IwasawaResult, split_report
from dpwlab.chart import MinimalChartData, associated_family_form, sphere_data, clifford_data
from dpwlab.potential import DPWPotential, RationalFunction, lawson_potential, validate_pole_structure
from dpwlab.transport import Path, parallel_transport, holonomy, abelianness_probe
from dpwlab.synthesis import extended_frame, sym_point_surface, geometry_report
from dpwlab.genus2 import HyperellipticCurve, divisor_class, complete_to_KS, rr_basis
from dpwlab.extensions import classify_to_quadratic, stability_check, hopf_pairing

__version__ = "0.1.0"
