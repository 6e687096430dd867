"""vecu: build, run and tune virtual ECUs on a plain workstation."""

__version__ = "0.1.0"
