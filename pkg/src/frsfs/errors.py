"""Exception hierarchy shared by every module of the package."""


class FrsError(Exception):
    """Base class for all errors raised by frsfs."""


class InputError(FrsError):
    """Bad input data or arguments (CLI exit code 2)."""


class ComputationError(FrsError):
    """A computation could not be carried out (CLI exit code 3)."""


# dataset loading
class EmptyFile(InputError):
    pass


class UnknownLabelColumn(InputError):
    pass


class MissingValue(InputError):
    def __init__(self, row, col):
        super().__init__(f"missing value at row {row}, column {col!r}")
        self.row = row
        self.col = col


class RaggedRow(InputError):
    def __init__(self, row, expected, got):
        super().__init__(f"row {row} has {got} values, expected {expected}")
        self.row = row


class MalformedHeader(InputError):
    pass


class UnsupportedAttributeType(InputError):
    pass


class UnknownFeatureInAlias(InputError):
    pass


class FeatureUniverseMismatch(InputError):
    pass


# numerics
class OutOfRange(InputError):
    pass


class EmptyInput(InputError):
    pass


class EmptySubset(InputError):
    pass


class ArityMismatch(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonDiscreteFeature(InputError):
    pass


class NonFiniteValue(InputError):
    pass


class DegenerateLabels(ComputationError):
    """Fewer than two distinct labels where a decision boundary is needed."""


class TooManyFeatures(InputError):
    pass
