"""Backend selection for the hot loops.

The compiled extension ``lvattn._core`` is preferred; the pure-Python module
``lvattn._core_py`` is used when the extension is missing or when the
environment variable ``LVATTN_PURE=1`` is set at import time.
"""
from __future__ import annotations

import importlib
import os
from types import ModuleType

_BACKENDS = {"compiled": "lvattn._core", "python": "lvattn._core_py"}


def load_backend(name: str) -> ModuleType:
    try:
        return importlib.import_module(_BACKENDS[name])
    except KeyError:
        raise ValueError(f"unknown backend {name!r}") from None


def available_backends() -> list[str]:
    names = []
    for name in _BACKENDS:
        try:
            load_backend(name)
        except ImportError:
            continue
        names.append(name)
    return names


def _select() -> tuple[str, ModuleType]:
    if os.environ.get("LVATTN_PURE", "") not in ("", "0"):
        return "python", load_backend("python")
    try:
        return "compiled", load_backend("compiled")
    except ImportError:
        return "python", load_backend("python")


BACKEND, _impl = _select()
integrate_lv = _impl.integrate_lv
attention_loss_grad = _impl.attention_loss_grad
