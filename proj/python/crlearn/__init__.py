"""Simulation-based Bayesian inference with Cressie-Read contrast summaries.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__version__ = "0.1.0"
__doc__ = _core_doc
