"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set ``NEARFAR_PURE_PYTHON=1`` in the environment to force the fallback (used
by the benchmark and the backend-equivalence tests).
"""

import os

from . import _fallback

if os.environ.get("NEARFAR_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

pairwise_distances = _impl.pairwise_distances
nf_steering_block = _impl.nf_steering_block
nf_probe_objectives = _impl.nf_probe_objectives


def backend_name() -> str:
    """Either "compiled" or "fallback"."""
    return "compiled" if _impl.__name__.endswith("_core") else "fallback"
