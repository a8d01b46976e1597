"""Selects the compiled kernel backend, falling back to pure Python.

Set EPISPREAD_BACKEND=cython or EPISPREAD_BACKEND=purepy to force a choice
(useful for benchmarking); by default the compiled extension is used when it
was built.
"""

import importlib
import os

BACKEND_NAMES = ("cython", "purepy")


def load_backend(name):
    """Import and return one kernel module by name."""
    if name == "cython":
        return importlib.import_module("epispread._core")
    if name == "purepy":
        return importlib.import_module("epispread._purepy")
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKEND_NAMES}")


def _select():
    forced = os.environ.get("EPISPREAD_BACKEND")
    if forced:
        return load_backend(forced), forced
    try:
        return load_backend("cython"), "cython"
    except ImportError:
        return load_backend("purepy"), "purepy"


kernels, BACKEND = _select()
