"""Kernel backend selection.

The compiled extension is preferred; the pure-Python twin is used when
the extension is unavailable or when INCOMPAT_PURE is set in the
environment.  Both expose the same functions with identical numerics.
"""

import os

if os.environ.get("INCOMPAT_PURE"):
    from . import _pure as _impl
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

BACKEND = _impl.BACKEND
busch_f_raw = _impl.busch_f_raw
proj_slack = _impl.proj_slack
sr_witness_scan = _impl.sr_witness_scan
min_f_plane = _impl.min_f_plane
min_f_line = _impl.min_f_line
