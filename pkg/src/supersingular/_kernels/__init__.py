"""Kernel selection: compiled Cython core if importable, pure Python otherwise.

Set ``SUPERSINGULAR_PURE_PYTHON=1`` in the environment to force the
fallback.  :func:`use_backend` switches temporarily (tests, benchmarks).
Callers must go through the module-level names (``_kernels.short_vectors``)
so that a switch takes effect.
"""
from __future__ import annotations

import os
from contextlib import contextmanager

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

INT64_LIMIT = (1 << 62)

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

BACKEND = "python" if (_ckernels is None or os.environ.get("SUPERSINGULAR_PURE_PYTHON")) else "cython"
_impl = _BACKENDS[BACKEND]


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def fits_int64(*bounds: int) -> bool:
    """True if every given magnitude bound is safely inside int64 range."""
    return all(abs(b) < INT64_LIMIT for b in bounds)


def _set(name: str):
    global BACKEND, _impl
    if name not in _BACKENDS:
        raise ValueError(f"kernel backend {name!r} is not available")
    BACKEND = name
    _impl = _BACKENDS[name]


@contextmanager
def use_backend(name: str):
    old = BACKEND
    _set(name)
    try:
        yield
    finally:
        _set(old)


def short_vectors(n, E, M, W, R, top_lo=None, top_hi=None, *, safe_int64=True):
    impl = _impl if safe_int64 else _pykernels
    return impl.short_vectors(n, E, M, W, R, top_lo, top_hi)


def isometry_backtrack(n, cands, images, target, cap, *, safe_int64=True):
    impl = _impl if safe_int64 else _pykernels
    return impl.isometry_backtrack(n, cands, images, target, cap)


def isotropic_rref(q, n, k, addt, mult, gram, pivot_sets):
    return _impl.isotropic_rref(q, n, k, addt, mult, gram, pivot_sets)


def gf_rank(rows, ncols, addt, mult, negt, invt):
    return _impl.gf_rank(rows, ncols, addt, mult, negt, invt)
