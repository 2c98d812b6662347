"""Exception hierarchy.

The CLI maps each family to an exit code: ``InputError`` -> 2,
``CapExceeded`` -> 3, ``InvariantViolation`` -> 1.
"""


class ExtractorLabError(Exception):
    pass


class InputError(ExtractorLabError, ValueError):
    pass


class CapExceeded(ExtractorLabError):
    pass


class InvariantViolation(ExtractorLabError):
    pass


class InvalidModulus(InputError):
    pass


class CompositeModulus(InvalidModulus):
    pass


class EvenModulus(InvalidModulus):
    pass


class DimensionMismatch(InputError):
    pass


class FieldMismatch(InputError):
    pass


class EmptySupport(InputError):
    pass


class NotADistribution(InputError):
    pass


class InvalidExponent(InputError):
    pass


class NoIsotropicDirection(InputError):
    pass


class InadmissibleField(InputError):
    pass


class UniverseTooLarge(CapExceeded):
    pass


class SetTooLarge(CapExceeded):
    pass


class RoundingUnstable(InvariantViolation):
    pass


class InadmissibleFieldWarning(UserWarning):
    """The field violates a construction hypothesis; results are still computed."""
