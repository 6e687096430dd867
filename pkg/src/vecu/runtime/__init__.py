"""Image loading, stepping, measurement, and trace handling."""

from .instance import (MeasurementConfig, VEcuInstance, load_vecu,
                       read_signal, run, set_parameter)
from .measure import parse_measurement
from .trace import (CompareReport, Trace, compare_traces, export_trace,
                    import_trace)

__all__ = [
    "CompareReport",
    "MeasurementConfig",
    "parse_measurement",
    "Trace",
    "VEcuInstance",
    "compare_traces",
    "export_trace",
    "import_trace",
    "load_vecu",
    "read_signal",
    "run",
    "set_parameter",
]
