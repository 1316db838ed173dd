"""Optional numba acceleration.

Set FANIKIT_DISABLE_NUMBA=1 (or numba's own NUMBA_DISABLE_JIT=1) to force
the pure-numpy kernels. The flag is read on every dispatch so tests can
flip it with monkeypatch.
"""

from __future__ import annotations

import logging
import os

log = logging.getLogger(__name__)

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False
    log.warning("numba not importable, using numpy kernels")


def _truthy(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


def enabled() -> bool:
    return HAVE_NUMBA and not _truthy("FANIKIT_DISABLE_NUMBA") and not _truthy("NUMBA_DISABLE_JIT")


def njit(*args, **kwargs):
    """numba.njit when numba is present, else a no-op decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


def thread_cap(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("FANIKIT_THREADS", default)))
    except ValueError:
        return default
