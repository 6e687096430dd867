"""Parsers and pretty-printers for the five text input formats."""

from .ast import (CalibrationSet, EventSpec, ModuleSpec, OsSpec, ParamDecl,
                  RunnableSpec, StateDecl, TypeDictionary, VecuConfig)
from .calibration import parse_calibration, print_calibration
from .config import parse_vecu_config, print_vecu_config
from .dictionary import parse_dictionary, print_dictionary
from .module import parse_module, print_module
from .osspec import parse_os_spec, print_os_spec

__all__ = [
    "CalibrationSet", "EventSpec", "ModuleSpec", "OsSpec", "ParamDecl",
    "RunnableSpec", "StateDecl", "TypeDictionary", "VecuConfig",
    "parse_calibration", "print_calibration",
    "parse_vecu_config", "print_vecu_config",
    "parse_dictionary", "print_dictionary",
    "parse_module", "print_module",
    "parse_os_spec", "print_os_spec",
]
