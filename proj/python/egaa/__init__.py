"""Anderson acceleration as adaptive momentum.

Energy-guarded Anderson acceleration, its mixing diagnostics (effective mass,
consistency deviation, acceleration gain factor) and the continuous-time limit
integrators, backed by the C++ core.
"""

try:
    from ._egaa import *  # noqa: F401,F403
    from ._egaa import __version__  # noqa: F401
except ImportError:  # in-tree builds place the module next to this package
    from _egaa import *  # noqa: F401,F403
    from _egaa import __version__  # noqa: F401
