"""Concrete profile implementations.

The acceptance suite lives in :mod:`slab_scatter.implementations.acceptance`
and is imported on demand because it depends on the whole package.
"""

from .profiles import CallableProfile, ConstProfile, PolyProfile, TableProfile, profile_from_dict

__all__ = [
    "ConstProfile",
    "PolyProfile",
    "TableProfile",
    "CallableProfile",
    "profile_from_dict",
]
