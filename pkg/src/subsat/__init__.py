"""subsat: finite-model workbench for satisfiability in submodels."""

__version__ = "0.1.0"
