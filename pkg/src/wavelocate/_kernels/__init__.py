"""Hot-kernel backend selection.

The compiled Cython extension is preferred; the numpy fallback is used
when the extension is missing or when ``WAVELOCATE_PURE`` is set in the
environment (any non-empty value).
"""

import os

from . import pure

if os.environ.get("WAVELOCATE_PURE"):
    _backend = pure
else:
    try:
        from . import _core as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = pure

BACKEND_NAME: str = _backend.NAME
fhn_advance = _backend.fhn_advance
ntdoa_objective = _backend.ntdoa_objective
