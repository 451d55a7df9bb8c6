"""Two-arc rolling chassis: equilibria, rolling sequences, transition maps
and telemetry analysis.

The compiled extension lives at ``arcroll._core`` in an installed package.
When working from a source checkout, the freshly built module sits on
``sys.path`` (the CMake build directory) under its bare name instead.
"""

try:
    from . import _core as _c
except ImportError:  # source checkout: build dir on sys.path
    import _core as _c

globals().update({name: getattr(_c, name) for name in dir(_c) if not name.startswith("_")})
__all__ = sorted(name for name in dir(_c) if not name.startswith("_"))
__version__ = "0.1.0"
del _c
