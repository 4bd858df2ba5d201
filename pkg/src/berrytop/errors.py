"""Exception types shared across the package."""


class DegenerateFieldError(Exception):
    """The effective field vanishes; spin eigenstates and gauges are undefined there."""


class ChartSingularError(Exception):
    """Evaluation point lies on (or too close to) the chart's excluded half-axis.

    Carries the offending chart so callers can switch to the other one.
    """

    def __init__(self, chart, message=None):
        self.chart = chart
        super().__init__(message or f"point on the singular axis of the {chart.name} chart")


class NonPlanarFieldError(Exception):
    """A planar (bz == 0) field was required but the field leaves the plane."""


class FieldSpecError(Exception):
    """Base class for field-expression errors; carries a byte offset into the source.

    ``component`` is set to "bx"/"by"/"bz" once the error is attributed to a
    component of a full field spec; the rendered message follows suit.
    """

    def __init__(self, message, position=None, component=None):
        super().__init__(message)
        self.message = message
        self.position = position
        self.component = component

    def __str__(self):
        prefix = f"in component {self.component}: " if self.component else ""
        suffix = f" (at offset {self.position})" if self.position is not None else ""
        return f"{prefix}{self.message}{suffix}"


class LexError(FieldSpecError):
    """Illegal character or malformed number in an expression source."""


class ExprSyntaxError(FieldSpecError):
    """Token stream does not match the expression grammar."""


class ExprEvalError(FieldSpecError):
    """Runtime evaluation failure (division by zero, sqrt of a negative, ...)."""


class UnknownIdentifierError(ExprEvalError):
    """Expression refers to a name that is neither kx/ky/kz nor a declared parameter."""

    def __init__(self, name, position=None, component=None):
        self.name = name
        super().__init__(f"unknown identifier '{name}'", position, component)
