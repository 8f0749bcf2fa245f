"""Select the solver kernel: compiled extension if available, numpy otherwise.

The environment variable QCONSIST_PURE_PYTHON=1 forces the fallback. Tests
and the benchmark switch backends per call with ``use(...)``.
"""
from __future__ import annotations

import contextlib
import os

from . import _fw_fallback

_BACKENDS = {"python": _fw_fallback}

try:  # pragma: no cover - exercised only when the extension is built
    from . import _fw_kernel

    _BACKENDS["compiled"] = _fw_kernel
except ImportError:  # pragma: no cover
    _fw_kernel = None

if os.environ.get("QCONSIST_PURE_PYTHON", "") not in ("", "0"):
    _active = _BACKENDS["python"]
else:
    _active = _BACKENDS.get("compiled", _BACKENDS["python"])


def available() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def active():
    return _active


def get(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; have {available()}") from None


@contextlib.contextmanager
def use(name: str):
    """Temporarily switch the active kernel (not thread-safe)."""
    global _active
    prev = _active
    _active = get(name)
    try:
        yield _active
    finally:
        _active = prev
