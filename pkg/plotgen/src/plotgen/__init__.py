"""CSV-to-figure renderer for simulation sweep results."""

__version__ = "0.1.0"

from .figure import (  # noqa: F401
    BOUND_COLUMNS,
    EmptyInputError,
    FigureSpec,
    PlotgenError,
    REQUIRED_COLUMNS,
    SchemaMismatchError,
    render,
)
