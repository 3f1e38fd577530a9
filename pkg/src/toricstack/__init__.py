"""Exact computations for toric Deligne-Mumford stacks and toric stack bundles.

Modules:

* ``intlin``: integer linear algebra (Smith form, kernels, Gale duals)
* ``stackyfan``: stacky fans, box elements, S-extensions
* ``degrees``: extended degrees, reduction to box elements, football maps
* ``symring``: the coefficient ring ``Q(chi, z) (x) H*(B)`` and residues
* ``ifunc``: fixed-section I-function restrictions and the pole/recursion checks
* ``gfunc``: Bernoulli G-functions and the quantum Riemann-Roch factor
* ``hirzebruch``: the bundle-versus-toric comparison for Hirzebruch surfaces
* ``cli``: the batch runner
"""
from importlib.resources import files

from .degrees import DegreeFunctional, enumerate_degrees, football_map, football_maps, reduce
from .errors import ToricStackError
from .gfunc import bernoulli_poly, check_g_identities, check_qrr_factor, g_function, gerbe_rescale
from .ifunc import (
    BundleData,
    IContext,
    check_C1,
    check_C2,
    fixed_weights,
    hyper_factor,
    i_coefficient,
    i_restriction,
    rec_coefficient,
    rec_coefficient_derived,
)
from .intlin import gale_dual, kernel_basis, smith_normal_form
from .report import Report
from .stackyfan import SExtendedFan, StackyFan, check_sequences, extend, validate
from .symring import BaseAlgebra, SymExpr, render, residue_at, sym_ring

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a shipped problem file, e.g. ``fixture_path("p1")``."""
    return files(__name__).joinpath("fixtures", f"{name}.json")


__all__ = [
    "BaseAlgebra", "BundleData", "DegreeFunctional", "IContext", "Report", "SExtendedFan", "StackyFan",
    "SymExpr", "ToricStackError", "bernoulli_poly", "check_C1", "check_C2", "check_g_identities",
    "check_qrr_factor", "check_sequences", "enumerate_degrees", "extend", "fixed_weights", "fixture_path",
    "football_map", "football_maps", "g_function", "gale_dual", "gerbe_rescale", "hyper_factor",
    "i_coefficient", "i_restriction", "kernel_basis", "rec_coefficient", "rec_coefficient_derived",
    "reduce", "render", "residue_at", "smith_normal_form", "sym_ring", "validate",
]
