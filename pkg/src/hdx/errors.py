"""Exception hierarchy shared by the library and the CLI."""


class HdxError(Exception):
    """Base class for all errors raised by :mod:`hdx`."""

    exit_code = 1
    kind = "error"


class ValidationError(HdxError, ValueError):
    """Bad input: out-of-range parameters, malformed complexes, overlapping sets."""

    exit_code = 2
    kind = "validation_error"


class NumericalError(HdxError, ArithmeticError):
    """An eigensolve failed, or a quantity that must be an integer is not."""

    exit_code = 3
    kind = "numerical_error"


class CertificationError(ValidationError):
    """A complex cannot be certified as an expander at the requested dimension."""

    kind = "certification_error"


class BoundViolation(HdxError):
    """An inequality that should hold was observed to fail."""

    exit_code = 4
    kind = "bound_violation"
