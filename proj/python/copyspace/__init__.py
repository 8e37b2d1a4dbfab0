"""Copyspace detection toolkit.

Heuristic copyspace detection over complexity maps, reproducible synthetic
dataset generation, and IoU/mAP evaluation stratified by design-complexity
class. The heavy lifting lives in the C++ extension module.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
