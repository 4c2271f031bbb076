import logging


class GroundingError(Exception):
    def __init__(self, message):
        logging.warning(message)
        super().__init__(message)


class ZeroVectorError(GroundingError):
    def __init__(self, norm, message='cannot normalize vector'):
        super().__init__(f"{message}: norm {norm:.3e} is below 1e-12")


class DimMismatchError(GroundingError):
    def __init__(self, left, right, message='dimension mismatch'):
        self.left = left
        self.right = right
        super().__init__(f"{message}: `{left}` vs `{right}`")


class NonFiniteError(GroundingError):
    def __init__(self, what='input'):
        super().__init__(f"{what} contains NaN or Inf")


class ParseError(GroundingError):
    def __init__(self, source, field=None, line=None, reason=''):
        self.source = source
        self.field = field
        self.line = line
        where = f"{source}"
        if line is not None:
            where = f"{where}:{line}"
        if field is not None:
            where = f"{where} field `{field}`"
        super().__init__(f"failed to parse {where}{f': {reason}' if reason else ''}")


class SchemaError(GroundingError):
    def __init__(self, source, invariant, line=None):
        self.source = source
        self.invariant = invariant
        self.line = line
        where = f"{source}:{line}" if line is not None else f"{source}"
        super().__init__(f"schema violation in {where}: {invariant}")


class NotConvergedError(GroundingError):
    def __init__(self, result):
        self.result = result
        super().__init__(
            f"sinkhorn did not converge after {result.iterations} iterations "
            f"(marginal violation {result.violation:.3e})"
        )


class NumericOverflowError(GroundingError):
    def __init__(self, message='numeric overflow'):
        super().__init__(message)


class BadTError(GroundingError):
    def __init__(self, T):
        super().__init__(f"number of selected frames must be at least 1, got {T}")


class EmptyQueryError(GroundingError):
    def __init__(self, message='rollout query has no word indices'):
        super().__init__(message)


class InfeasibleAlignmentError(GroundingError):
    def __init__(self, frames, slots):
        super().__init__(f"cannot align {frames} frames to {slots} transcript slots")


class NoSamplesError(GroundingError):
    def __init__(self, metric):
        super().__init__(f"no samples to evaluate `{metric}`")


class NoPointsError(GroundingError):
    def __init__(self, message='at least one point is required to build a box'):
        super().__init__(message)


class BadParamsError(GroundingError):
    def __init__(self, message):
        super().__init__(message)


class ConfigError(GroundingError):
    def __init__(self, field, value, expected):
        self.field = field
        super().__init__(f"invalid `{field}` = {value!r}: expected {expected}")
