"""Kernel backend selection.

Two interchangeable implementations of the sample-synthesis kernel exist:
a numba-compiled scalar loop and a pure-numpy chunked matrix version. The
environment variable CUBICBER_BACKEND forces one ("numba" or "numpy");
unset, numba is used when importable. Both produce the same samples from
the same seeds (agreement to ~1e-12 relative; the float summation orders
differ, so bitwise equality holds within a backend but not across).
"""

from __future__ import annotations

import os

from .params import ParamError

_VALID = ("numba", "numpy")
_active: str | None = None


def _resolve() -> str:
    req = os.environ.get("CUBICBER_BACKEND", "").strip().lower()
    if req and req not in _VALID:
        raise ParamError(
            f"CUBICBER_BACKEND must be one of {_VALID}, got {req!r}"
        )
    if req == "numpy":
        return "numpy"
    try:
        from . import _mc_numba  # noqa: F401

        if not _mc_numba.NUMBA_OK:
            raise ImportError("numba import failed")
        return "numba"
    except ImportError:
        if req == "numba":
            raise ParamError(
                "CUBICBER_BACKEND=numba but numba is not installed"
            ) from None
        return "numpy"


def active_backend() -> str:
    """Name of the backend in use ("numba" or "numpy")."""
    global _active
    if _active is None:
        _active = _resolve()
    return _active


def decision_sums(seed, start_trial, ntrials, bit, S, w, sig, sigma0,
                  backend=None):
    """Raw trapezoid window sums of |r|^2, |r|^4, |r|^6 for a trial range.

    Returns an (ntrials, 3) float64 array; the caller applies receiver
    prefactors. backend overrides the module-level selection per call.
    """
    name = backend if backend is not None else active_backend()
    if name not in _VALID:
        raise ParamError(f"backend must be one of {_VALID}, got {name!r}")
    if name == "numba":
        from . import _mc_numba

        if not _mc_numba.NUMBA_OK:
            raise ParamError("numba backend requested but numba is not installed")
        return _mc_numba.decision_sums(seed, start_trial, ntrials, bit,
                                       S, w, sig, sigma0)
    from . import _mc_numpy

    return _mc_numpy.decision_sums(seed, start_trial, ntrials, bit,
                                   S, w, sig, sigma0)
