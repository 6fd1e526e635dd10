"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``HILL_KREIN_NUMBA`` is not
set to a false value (``0``, ``false``, ``no``, ``off``).  Both paths are
importable directly as :mod:`.numba_impl` and :mod:`.numpy_impl` so they
can be compared in tests and benchmarks.
"""

import os

from . import numpy_impl

_FALSE = {"0", "false", "no", "off"}


def _want_numba():
    if os.environ.get("HILL_KREIN_NUMBA", "1").strip().lower() in _FALSE:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


if _want_numba():
    from . import numba_impl as _impl

    BACKEND = "numba"
else:
    _impl = numpy_impl
    BACKEND = "numpy"

sncndn = _impl.sncndn
trig_potential_matrix = _impl.trig_potential_matrix
sine_potential_matrix = _impl.sine_potential_matrix

__all__ = ["BACKEND", "sncndn", "trig_potential_matrix", "sine_potential_matrix"]
