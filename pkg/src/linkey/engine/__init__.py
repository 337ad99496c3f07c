"""Engine backend selection.

Two interchangeable cores exist: a compiled extension (``_native``, built
from Cython) and a pure-Python twin (``pycore``).  Import prefers the
compiled one and silently falls back.  Set ``LINKEY_BACKEND=pure`` or
``LINKEY_BACKEND=native`` to force a choice; forcing ``native`` raises if
the extension is unavailable.
"""

from __future__ import annotations

import importlib
import os

from . import pycore

_FORCED = os.environ.get("LINKEY_BACKEND", "").strip().lower()

_native = None
if _FORCED != "pure":
    try:
        _native = importlib.import_module("linkey.engine._native")
    except ImportError:
        _native = None
        if _FORCED == "native":
            raise ImportError(
                "LINKEY_BACKEND=native but the compiled engine is not built")

DEFAULT_BACKEND = "native" if _native is not None else "pure"


def available_backends() -> tuple[str, ...]:
    return ("native", "pure") if _native is not None else ("pure",)


def get_module(backend: str = "auto"):
    """Return the engine module implementing the requested backend."""
    if backend in ("auto", ""):
        backend = DEFAULT_BACKEND
    if backend == "pure":
        return pycore
    if backend == "native":
        if _native is None:
            raise ImportError("compiled engine is not built")
        return _native
    raise ValueError("unknown backend %r" % backend)


def make_engine(cfg, order=None, backend: str = "auto"):
    """Build an Engine from a SimConfig on the chosen backend."""
    return get_module(backend).Engine(cfg, order)
