"""Pick the compiled merge kernels when built, the numpy ones otherwise.

:func:`set_backend` switches at run time (used by the benchmark and the parity
tests).
"""

from __future__ import annotations

from . import _kernels_py

try:
    from . import _twkernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_backend = _kernels_py if _compiled is None else _compiled


def available() -> list[str]:
    return ["python"] + (["compiled"] if _compiled is not None else [])


def backend_name() -> str:
    return "compiled" if _backend is _compiled and _compiled is not None else "python"


def set_backend(name: str) -> None:
    global _backend
    if name == "python":
        _backend = _kernels_py
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _backend = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")


def trial_merge(st, alive, red, deg, p, q) -> int:
    return _backend.trial_merge(st, alive, red, deg, p, q)


def apply_merge(st, alive, red, deg, p, q) -> int:
    return _backend.apply_merge(st, alive, red, deg, p, q)
