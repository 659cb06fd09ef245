"""Candidates for rational points on genus 2 curves by quadratic Chabauty, one residue disk at a time."""

from .biextension import BiextPoint, KappaContext, PolyMapKappa, kappa_poly, phi, rho_N
from .cli import RunConfig, load_config, run_pipeline
from .disk import (
    DiskContext,
    DiskReport,
    GeoSet,
    eliminate_embedding,
    embed_disk,
    geo_set,
    refine_higher_disk,
    solve_disk,
)
from .errors import ChabautyError
from .jacobian import (
    CurvePoint,
    HyperellipticModel,
    MumfordDivisor,
    cantor_add,
    divisor_multiple,
)
from .padic_core import MultiPoly, PadicNumber, PadicPoly

__all__ = [
    "BiextPoint",
    "ChabautyError",
    "CurvePoint",
    "DiskContext",
    "DiskReport",
    "GeoSet",
    "HyperellipticModel",
    "KappaContext",
    "MultiPoly",
    "MumfordDivisor",
    "PadicNumber",
    "PadicPoly",
    "PolyMapKappa",
    "RunConfig",
    "cantor_add",
    "divisor_multiple",
    "embed_disk",
    "eliminate_embedding",
    "geo_set",
    "kappa_poly",
    "load_config",
    "phi",
    "refine_higher_disk",
    "rho_N",
    "run_pipeline",
    "solve_disk",
]
__version__ = "0.1.0"
