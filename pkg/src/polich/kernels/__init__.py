"""Automaton kernels: compiled extension when available, pure Python otherwise.

The hot loops (token masking during decoding and batch acceptance runs) are
implemented twice with an identical surface: ``_fsa`` (Cython) and ``_pure``.
The compiled backend is preferred at import time; ``POLICH_PURE=1`` forces
the fallback. ``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("POLICH_PURE") == "1":
    _impl = _pure
else:
    try:
        from . import _fsa as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND

EXPECT_TERM = _pure.EXPECT_TERM
AFTER_NOT = _pure.AFTER_NOT
AFTER_TERM = _pure.AFTER_TERM
DONE = _pure.DONE

valid_mask = _impl.valid_mask
step = _impl.step
accepts = _impl.accepts


def load_backend(name: str):
    """Return a specific backend module ("pure" or "compiled")."""
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _fsa  # type: ignore[attr-defined]
        return _fsa
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["pure"]
    try:
        from . import _fsa  # noqa: F401
        names.append("compiled")
    except ImportError:
        pass
    return names
