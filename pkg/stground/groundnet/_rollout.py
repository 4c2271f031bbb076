import numpy as np

from .._constants import LayerTypes
from ..exceptions import EmptyQueryError, GroundingError


FLAT_TOLERANCE = 1e-12


def minmax_normalize(scores):
    """Min-max scaling to [0, 1]; a flat map becomes all zeros."""
    scores = np.asarray(scores, dtype=np.float64)
    lo, hi = scores.min(), scores.max()
    if hi - lo <= FLAT_TOLERANCE:
        return np.zeros_like(scores)
    return (scores - lo)/(hi - lo)


def rollout_relevance(trace, residual_weight=0.5):
    """
    Video-token to word relevance `R` (TN x K).

    Self layers preceding the last cross layer are mixed with the identity,
    `w*I + (1-w)*A_self`, and chained in stack order in front of the last
    cross-attention; the first cross layer does not take part.
    """

    last = None
    for i, layer in enumerate(trace.layers):
        if layer['type'] == LayerTypes.CROSS:
            last = i
    if last is None:
        raise GroundingError('attention trace has no cross layer')
    relevance = trace.layers[last]['A_vs']
    mixing = np.eye(relevance.shape[0])
    for layer in trace.layers[:last]:
        if layer['type'] == LayerTypes.SELF:
            a = layer['A_video']
            mixing = mixing @ (residual_weight*np.eye(a.shape[0]) + (1 - residual_weight)*a)
    return mixing @ relevance


def rollout_heatmap(trace, query_word_indices, residual_weight=0.5):
    """
    Per-frame heatmaps (T x N) of the query words' rolled-out attention mass,
    min-max normalized over the whole clip.
    """

    query = sorted(set(int(k) for k in query_word_indices))
    if not query:
        raise EmptyQueryError()
    relevance = rollout_relevance(trace, residual_weight)
    raw = relevance[:, query].sum(axis=1)
    return minmax_normalize(raw).reshape(trace.num_frames, trace.num_cells)
