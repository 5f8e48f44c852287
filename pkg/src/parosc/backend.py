"""Select the time-stepping kernel implementation at import time.

The compiled extension ``parosc._step_c`` is preferred when it built; the
pure-Python twin ``parosc._step_py`` is the fallback.  Set the environment
variable ``PAROSC_BACKEND=python`` to force the fallback (useful for
benchmarks and for testing the pure path on machines with the extension).
"""
from __future__ import annotations

import os

from . import _step_py

if os.environ.get("PAROSC_BACKEND", "").lower() == "python":
    _impl = _step_py
    COMPILED = False
else:
    try:
        from . import _step_c as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        _impl = _step_py
        COMPILED = False

rk4_trajectory = _impl.rk4_trajectory
em_trajectory = _impl.em_trajectory


def backend_name() -> str:
    """'compiled' when the extension is active, else 'python'."""
    return "compiled" if COMPILED else "python"
