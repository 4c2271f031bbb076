import numpy as np

from .._constants import Poolings
from ..exceptions import DimMismatchError
from ._layers import normalize_rows_op


def frame_globals(clip, frames, pooling=Poolings.CLS):
    """Raw per-frame global features: the [CLS]-equivalent token or the mean of the grid."""
    frames = list(frames)
    if pooling == Poolings.MEAN:
        return clip.grid[frames].mean(axis=1)
    return clip.frame_global[frames]


def sentence_global(clip, pooling=Poolings.CLS):
    if pooling == Poolings.MAX:
        return clip.word_matrix.max(axis=0)
    return clip.sentence


def project_globals(features, w):
    features = np.atleast_2d(features)
    if features.shape[1] != w.shape[0]:
        raise DimMismatchError(features.shape, w.shape, 'features vs projection')
    return normalize_rows_op(features @ w)[0]


def project_tokens(clip, selected_frames, params, attn_cfg=None):
    """
    Projects the selected frames' grid tokens and the words through the local
    layers, and frame/sentence globals through the global layers.

    Returns a dict with unit-norm `video` (TN x d'), `words` (K x d'),
    `frames` (T x d') and `sentence` (d').
    """

    selected_frames = list(selected_frames)
    if len(selected_frames) > clip.num_frames:
        raise DimMismatchError(len(selected_frames), clip.num_frames, 'selected frames vs U')
    params.check_dim(clip.dim)
    video_pooling = attn_cfg.video_pooling if attn_cfg else Poolings.CLS
    text_pooling = attn_cfg.text_pooling if attn_cfg else Poolings.CLS
    tokens = clip.grid[selected_frames].reshape(-1, clip.dim)
    return {
        'video': project_globals(tokens, params.W_f_local),
        'words': project_globals(clip.word_matrix, params.W_g_local),
        'frames': project_globals(frame_globals(clip, selected_frames, video_pooling), params.W_f),
        'sentence': project_globals(sentence_global(clip, text_pooling), params.W_g)[0],
    }
