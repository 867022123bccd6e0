"""Backend selection for the numeric kernels.

The compiled Cython module is used when it imports; otherwise the pure-Python
fallback is used. Set ``COOPGEO_PURE_PYTHON=1`` to force the fallback.
"""
import os

from coopgeo import _purekernels

if os.environ.get("COOPGEO_PURE_PYTHON", "") not in ("", "0"):
    _impl = _purekernels
    BACKEND = "python"
else:
    try:
        from coopgeo import _fastkernels as _impl
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _purekernels
        BACKEND = "python"

arc_metric_max = _impl.arc_metric_max
proximity_matrix = _impl.proximity_matrix
ser_mqam = _impl.ser_mqam
packet_success_snr = _impl.packet_success_snr

__all__ = ["BACKEND", "arc_metric_max", "proximity_matrix", "ser_mqam",
           "packet_success_snr"]
