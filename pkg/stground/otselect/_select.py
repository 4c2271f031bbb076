import logging

import numpy as np

from .._constants import SelectionStrategies
from ..exceptions import BadTError, ConfigError
from ._similarity import sentence_similarity, similarity_matrix
from ._sinkhorn import SinkhornConfig, sinkhorn


def top_frames(scores, T):
    """Indices of the `T` highest scores, ties to the lower index, returned ascending."""
    order = sorted(range(len(scores)), key=lambda u: (-scores[u], u))
    return sorted(order[:T])


def central_block(U, T):
    T = min(T, U)
    start = (U - T)//2
    return list(range(start, start + T))


def frame_scores(clip, strategy, params, cfg=None, attn_cfg=None):
    """Per-frame ranking scores of a strategy; `None` for the central-block strategy."""

    if strategy == SelectionStrategies.NONE:
        return None
    if strategy == SelectionStrategies.GLOBAL:
        return sentence_similarity(clip, params, attn_cfg)
    P = similarity_matrix(clip, params, attn_cfg)
    if strategy == SelectionStrategies.LOCAL:
        return P.max(axis=0)
    if strategy == SelectionStrategies.SINKHORN:
        Q = sinkhorn(P, cfg or SinkhornConfig()).plan
        # plan-weighted similarity; plain row sums of Q are all 1/U
        return np.sum(Q*P.T, axis=1)
    raise ConfigError('strategy', strategy, f"one of {SelectionStrategies.ALL}")


def select_frames(clip, strategy, T, params, cfg=None, attn_cfg=None):
    if T < 1:
        raise BadTError(T)
    if not SelectionStrategies.is_valid(strategy):
        raise ConfigError('strategy', strategy, f"one of {SelectionStrategies.ALL}")
    U = clip.num_frames
    if T >= U:
        params.check_dim(clip.dim)
        return list(range(U))

    scores = frame_scores(clip, strategy, params, cfg, attn_cfg)
    if scores is None:
        selected = central_block(U, T)
    else:
        selected = top_frames([float(s) for s in scores], T)
    logging.debug(f"{clip.clip_id}: {strategy} selected frames {selected}")
    return selected


def planted_recall(selected, gt):
    """Share of selected frames that fall inside the clip's annotated segments, out of what could."""
    annotated = {f for s in gt.segments for f in s.frames}
    if not selected or not annotated:
        return 0.0
    return len(set(selected) & annotated)/min(len(selected), len(annotated))
