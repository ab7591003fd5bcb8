"""Three equivalent one-move graph clearing processes and their solvers."""

__version__ = "0.1.0"
