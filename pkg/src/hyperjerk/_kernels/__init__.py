"""RK4 kernel backend selection.

Imports the compiled extension when available and falls back to the pure
Python twin otherwise.  Setting the environment variable
``HYPERJERK_PURE_PYTHON=1`` before import forces the fallback; the
``benchmarks/benchmark_kernels.py`` script compares both backends directly.
"""

from __future__ import annotations

import os

from . import _rk4_py

try:
    from . import _rk4 as _compiled
except ImportError:  # extension not built on this install
    _compiled = None

HAVE_COMPILED = _compiled is not None
FORCE_PYTHON = os.environ.get("HYPERJERK_PURE_PYTHON", "") not in ("", "0")

if HAVE_COMPILED and not FORCE_PYTHON:
    ACTIVE_BACKEND = "compiled"
    rk4_polyflow = _compiled.rk4_polyflow
else:
    ACTIVE_BACKEND = "python"
    rk4_polyflow = _rk4_py.rk4_polyflow

rk4_polyflow_python = _rk4_py.rk4_polyflow
rk4_polyflow_compiled = _compiled.rk4_polyflow if HAVE_COMPILED else None
