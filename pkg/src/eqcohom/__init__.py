"""Homology and cohomology of finite groups with operators.

Layers, bottom up: ``zmod`` (integer linear algebra), ``grp`` (finite groups
and operator actions), ``gmod`` (modules), ``bar`` (bar complexes), ``cohom``
((co)homology, Tate groups, cup products, exact sequences), ``eqgrp``
(operator commutators and abelianization), ``ext`` (extensions) and ``cli``.
"""

from __future__ import annotations

from .cohom import cohomology, homology, tate
from .errors import CapExceeded, EqcohomError, PreconditionError, ValidationError
from .gmod import make_module, trivial_module
from .grp import build_action, build_group, standard_group, trivial_action, trivial_group
from .zmod import FgAbelianGroup

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "EqcohomError",
    "FgAbelianGroup",
    "PreconditionError",
    "ValidationError",
    "build_action",
    "build_group",
    "cohomology",
    "homology",
    "make_module",
    "standard_group",
    "tate",
    "trivial_action",
    "trivial_group",
    "trivial_module",
]
