"""Exception hierarchy shared by all pipeline stages.

Everything raised on bad data or bad configuration derives from
ToolkitError so the CLI can map failures to exit code 1.
"""


class ToolkitError(Exception):
    """Base class for all toolkit-level failures."""


class SchemaError(ToolkitError):
    """A CSV/JSON document does not match the expected schema."""


class ParseError(ToolkitError):
    """A cell or value could not be parsed; message carries the row number."""


class DegenerateInputError(ToolkitError):
    """Input is structurally valid but carries no usable signal."""


class InsufficientDataError(ToolkitError):
    """Not enough samples to satisfy an operation's precondition."""


class ParameterError(ToolkitError):
    """An out-of-range or unknown parameter; message names the parameter."""


class NumericalError(ToolkitError):
    """A numerical routine produced a non-finite or invalid result."""
