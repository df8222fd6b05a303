from ._nlkg import *  # noqa: F401,F403
from ._nlkg import __doc__  # noqa: F401
