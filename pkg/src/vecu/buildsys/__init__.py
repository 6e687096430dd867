"""Incremental compilation and deterministic linking."""

from .build import BuildReport, Workspace, build, detect_changes
from .cache import BuildCache
from .compile import CompiledModule, compile_module
from .image import VEcuImage, load_image_file, save_image
from .link import link
from .wrapper import Interface, generate_wrapper

__all__ = [
    "BuildCache", "BuildReport", "CompiledModule", "Interface", "VEcuImage",
    "Workspace", "build", "compile_module", "detect_changes",
    "generate_wrapper", "link", "load_image_file", "save_image",
]
