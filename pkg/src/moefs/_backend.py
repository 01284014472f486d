"""Select the kernel implementation at import time.

The compiled extension is used when it was built; setting
``MOEFS_BACKEND=python`` forces the numpy fallback.
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("MOEFS_BACKEND", "").lower() == "python":
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _fallback

BACKEND = kernels.NAME
