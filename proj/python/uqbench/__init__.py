"""Python bindings for the uqbench benchmark harness."""

try:
    from ._uqbench import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _uqbench import *  # noqa: F401,F403  (in-tree build layout)
