"""Aerial-manipulator flower-targeting simulator.

Thin python surface over the C++ core: rigid-body dynamics with a 2-DoF arm,
synthetic RGB-D target localization, sampling-based standoff control, the
mission state machine, and the batch trial harness.
"""

from amsim._core import *  # noqa: F401,F403
from amsim._core import __doc__ as _core_doc

__doc__ = _core_doc if _core_doc else __doc__
