"""Kernel backend selection.

Hot numeric kernels ship in two variants: numba-compiled loops and a pure
numpy/scipy path. The active backend is chosen once at import time from the
``HYLA_NUMBA`` environment variable:

  HYLA_NUMBA=1     require numba (ImportError if missing)
  HYLA_NUMBA=0     force the numpy path
  HYLA_NUMBA=auto  use numba when importable (default)
"""

import os

_FLAG = os.environ.get("HYLA_NUMBA", "auto").strip().lower()

if _FLAG in ("0", "off", "false", "no"):
    NUMBA_ENABLED = False
elif _FLAG in ("1", "on", "true", "yes"):
    import numba  # noqa: F401  (hard requirement when explicitly requested)

    NUMBA_ENABLED = True
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
