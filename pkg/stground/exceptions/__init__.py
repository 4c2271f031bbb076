from ._exceptions import (
    GroundingError,
    BadParamsError,
    BadTError,
    ConfigError,
    DimMismatchError,
    EmptyQueryError,
    InfeasibleAlignmentError,
    NoPointsError,
    NoSamplesError,
    NonFiniteError,
    NotConvergedError,
    NumericOverflowError,
    ParseError,
    SchemaError,
    ZeroVectorError,
)
