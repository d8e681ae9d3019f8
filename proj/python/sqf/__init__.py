"""Symmetric two-queue shortest-queue-first workload analytics.

Thin re-export of the compiled extension; see the project README for the
mathematical surface (kernel roots, cubic branches, the M series, Laplace
transforms, tail laws, numerical inversion and the event simulator).
"""

from ._sqf import *  # noqa: F401,F403
from ._sqf import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = __doc__ + "\n\n" + (_core_doc or "")
