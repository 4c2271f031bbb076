from ._linalg import (
    ZERO_NORM,
    as_matrix,
    as_vector,
    cosine,
    cosine_matrix,
    l2_normalize,
    log_softmax,
    matmul,
    normalize_rows,
    softmax,
)
from ._rng import Rng
from ._grad import GradBundle, finite_diff_check
