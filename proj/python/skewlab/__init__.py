from ._skewlab import *  # noqa: F401,F403
from ._skewlab import __version__, SkewlabError  # noqa: F401
