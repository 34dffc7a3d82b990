"""Update-efficient error-correcting regenerating codes over GF(2^m)."""
from .codes import make_code
from .errors import (
    CodeError,
    DecodeFailure,
    DimensionError,
    InsufficientHelpers,
    IntegrityFailure,
    InvalidParameter,
    ReconstructionFailure,
    RegenerationFailure,
    ShardFormatError,
    SingularMatrix,
)
from .field import GF2m, gen_poly, get_field, poly_eval, poly_mul
from .gfmatrix import GfMatrix, mat_inv, mat_mul, pack_symmetric, unpack_symmetric, update_complexity
from .mbr import MbrCode, MbrParams, MbrShare
from .msr import MsrCode, MsrParams, MsrShare, locate_bad_columns
from .progressive import Reconstruction
from .rs import RsCode

__version__ = "0.1.0"

__all__ = [
    "CodeError", "DecodeFailure", "DimensionError", "InsufficientHelpers", "IntegrityFailure",
    "InvalidParameter", "ReconstructionFailure", "RegenerationFailure", "ShardFormatError",
    "SingularMatrix", "GF2m", "gen_poly", "get_field", "poly_eval", "poly_mul", "GfMatrix",
    "mat_inv", "mat_mul", "pack_symmetric", "unpack_symmetric", "update_complexity",
    "MbrCode", "MbrParams", "MbrShare", "MsrCode", "MsrParams", "MsrShare",
    "locate_bad_columns", "Reconstruction", "RsCode", "make_code",
]
