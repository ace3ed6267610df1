"""Exception hierarchy shared by all modules."""


class TruefiError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(TruefiError, ValueError):
    """An argument is outside its valid domain."""


class FimiParseError(ParameterError):
    def __init__(self, line_no, token, message=None):
        self.line_no = line_no
        self.token = token
        super().__init__(message or f"line {line_no}: invalid item token {token!r}")


class EmptyDatasetError(ParameterError):
    """The operation needs at least one (or two) transactions."""


class ModelError(ParameterError):
    """A ground-truth model has an invalid probability vector."""


class StructuralError(ParameterError):
    """An itemset family violates a structural precondition."""


class InfeasibleThresholdError(TruefiError):
    """The lowered mining threshold would be non-positive."""


class ResourceLimitError(TruefiError):
    """A configured cap on candidate itemsets was exceeded."""
