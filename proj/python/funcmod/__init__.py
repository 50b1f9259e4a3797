"""Function-modeling evaluation harness: python surface over the C++ core."""

from funcmod._funcmod import *  # noqa: F401,F403
from funcmod._funcmod import __version__  # noqa: F401
