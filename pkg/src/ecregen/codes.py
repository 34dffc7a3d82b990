"""Scheme-name dispatch used by the CLI and the simulator."""
from __future__ import annotations

from .errors import InvalidParameter
from .mbr import MbrCode, MbrParams
from .msr import MsrCode, MsrParams


def make_code(scheme, n, k, d, m, gamma=1):
    """MsrCode or MbrCode from flat parameters.  MSR derives d = 2k-2; MBR needs it."""
    if scheme == "msr":
        params = MsrParams(n, k, m, gamma)
        if d is not None and d != params.d:
            raise InvalidParameter(f"MSR requires d = 2k-2 = {params.d}, got {d}")
        return MsrCode(params)
    if scheme == "mbr":
        if d is None:
            raise InvalidParameter("MBR requires an explicit d")
        if gamma != 1:
            raise InvalidParameter("gamma only applies to MSR")
        return MbrCode(MbrParams(n, k, d, m))
    raise InvalidParameter(f"unknown scheme {scheme!r}")
