import math

from scipy.stats import norm

from ..exceptions import BadParamsError, DimMismatchError


def qc_sample_size(alpha, eps, p, N):
    """
    Frames to check for a quality estimate at confidence `alpha` and margin
    `eps`: `N0 = z^2/eps^2 * p(1-p)` shrunk by the finite population factor,
    `N_S = floor(N0*N/(N0 + N - 1))`.
    """

    if not 0 < alpha < 1:
        raise BadParamsError(f"confidence must be in (0, 1), got {alpha}")
    if not 0 < eps < 1:
        raise BadParamsError(f"margin must be in (0, 1), got {eps}")
    if not 0 <= p <= 1:
        raise BadParamsError(f"proportion must be in [0, 1], got {p}")
    if N < 1:
        raise BadParamsError(f"population must be at least 1, got {N}")
    z = norm.ppf(1 - (1 - alpha)/2)
    n0 = z*z/(eps*eps)*p*(1 - p)
    if n0 == 0:
        return 0
    return int(math.floor(n0*N/(n0 + N - 1)))


def qc_agreement(specialist, aggregated):
    """
    Rates of aggregated false positives and false negatives against a
    specialist's presence labels. Either sequences of booleans or dicts
    keyed by frame; both must cover the same frames.
    """

    if isinstance(specialist, dict) or isinstance(aggregated, dict):
        if not (isinstance(specialist, dict) and isinstance(aggregated, dict)) or set(specialist) != set(aggregated):
            raise DimMismatchError(len(specialist), len(aggregated), 'specialist and aggregated frame sets differ')
        keys = sorted(specialist)
        specialist = [specialist[k] for k in keys]
        aggregated = [aggregated[k] for k in keys]
    if len(specialist) != len(aggregated):
        raise DimMismatchError(len(specialist), len(aggregated), 'specialist and aggregated frame counts differ')
    total = len(specialist)
    if total == 0:
        return {'fp_rate': 0.0, 'fn_rate': 0.0, 'disagree_rate': 0.0}
    fp = sum(1 for s, a in zip(specialist, aggregated) if a and not s)
    fn = sum(1 for s, a in zip(specialist, aggregated) if s and not a)
    return {'fp_rate': fp/total, 'fn_rate': fn/total, 'disagree_rate': (fp + fn)/total}
