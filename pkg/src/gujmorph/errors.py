"""Exception hierarchy shared across the toolkit.

The CLI maps these onto stable exit codes: OSError -> 1, ConfigError -> 2,
DataError -> 3.
"""


class GujmorphError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(GujmorphError):
    """Invalid configuration value or flag combination."""


class DataError(GujmorphError):
    """Input data violates a contract (alignment, schema, emptiness)."""


class SchemaViolation(DataError):
    """Feature bundle does not fit its POS schema."""


class UnknownBundle(DataError):
    """Feature bundle not present in the class registry."""


class UnknownClass(DataError):
    """Class id not present in the class registry."""


class BundleNotRegistered(DataError):
    """Training record carries a bundle missing from the supplied registry."""


class EmptyTrainingSet(DataError):
    """No records available to train on."""


class LengthMismatch(DataError):
    """Gold and predicted sequences are not aligned."""


class MismatchedTestSets(DataError):
    """Two systems were evaluated on different test sets."""


class ShapeMismatch(GujmorphError):
    """Tensor shapes are inconsistent with the model configuration."""


class NonFiniteError(GujmorphError):
    """A parameter, activation, gradient or loss became NaN/Inf."""
