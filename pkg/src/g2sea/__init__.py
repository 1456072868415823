"""Point counting for genus-2 Jacobians over small finite fields.

Naive Frobenius characteristic polynomials from exhaustive counts, the
Siegel-case Elkies route through Frobenius-stable Lagrangian kernels, the
real-multiplication route through residues of the real Frobenius, and a
file-based modular-equation provider, all cross-checked by brute-force
oracles at desk scale.
"""

from . import ff, genus2, frobenius, kernel, siegel, hilbert, modeq
from .errors import G2Error
from .ff import PrimeField, ExtField, FieldElement, UniPoly, ext_field_create
from .frobenius import CharPoly, chi_naive, order_over_extension, torsion_basis
from .genus2 import Genus2Curve, MumfordDivisor, igusa_invariants, parse_curve
from .hilbert import RealQuadField, RQElem, reconstruct_psi, rm_crt, split_prime
from .kernel import KernelIdeal, SubgroupPoints, ideal_from_subgroup
from .modeq import ModEqData, OracleKernelProvider, evaluate_at, parse_modeq
from .siegel import classify_prime, pipeline_count_siegel, rec_q

__version__ = "0.1.0"

__all__ = [
    "G2Error",
    "PrimeField",
    "ExtField",
    "FieldElement",
    "UniPoly",
    "ext_field_create",
    "CharPoly",
    "chi_naive",
    "order_over_extension",
    "torsion_basis",
    "Genus2Curve",
    "MumfordDivisor",
    "igusa_invariants",
    "parse_curve",
    "RealQuadField",
    "RQElem",
    "reconstruct_psi",
    "rm_crt",
    "split_prime",
    "KernelIdeal",
    "SubgroupPoints",
    "ideal_from_subgroup",
    "ModEqData",
    "OracleKernelProvider",
    "evaluate_at",
    "parse_modeq",
    "classify_prime",
    "pipeline_count_siegel",
    "rec_q",
    "ff",
    "genus2",
    "frobenius",
    "kernel",
    "siegel",
    "hilbert",
    "modeq",
]
