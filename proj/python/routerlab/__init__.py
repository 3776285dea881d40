"""Two-expert adaptive softmax router laboratory.

Thin wrapper around the C++ extension module. See the project README
for the model and the experiment suite.
"""

try:
    from routerlab._core import *  # noqa: F401,F403
    from routerlab._core import __version__  # noqa: F401
except ImportError:  # development layout: extension built next to the package
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
