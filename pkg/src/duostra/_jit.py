"""Selects between numba-compiled kernels and the plain numpy path.

Set ``DUOSTRA_DISABLE_NUMBA=1`` before importing :mod:`duostra` to run every
kernel as ordinary Python. Both paths execute the same source, so results are
identical; only speed differs.
"""

from __future__ import annotations

import os
from typing import Any, Callable, TypeVar

F = TypeVar("F", bound=Callable[..., Any])

_FLAG = "DUOSTRA_DISABLE_NUMBA"


def _numba_requested() -> bool:
    value = os.environ.get(_FLAG, "").strip().lower()
    return value not in ("1", "true", "yes", "on")


try:
    if not _numba_requested():
        raise ImportError
    import numba as _numba
except ImportError:
    _numba = None

USE_NUMBA: bool = _numba is not None


def kernel(func: F) -> F:
    """Compile ``func`` with ``njit(cache=True)`` when numba is active."""
    if _numba is None:
        return func
    return _numba.njit(cache=True, nogil=True)(func)  # type: ignore[return-value]


def python_impl(func: Callable[..., Any]) -> Callable[..., Any]:
    """Return the uncompiled Python body of a kernel."""
    return getattr(func, "py_func", func)
