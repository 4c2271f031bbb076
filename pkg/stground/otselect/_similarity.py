import numpy as np

from .._constants import Poolings
from ..groundnet import frame_globals, project_globals, sentence_global


def _poolings(attn_cfg):
    if attn_cfg is None:
        return Poolings.CLS, Poolings.CLS
    return attn_cfg.video_pooling, attn_cfg.text_pooling


def projected_frames(clip, params, attn_cfg=None):
    params.check_dim(clip.dim)
    video_pooling, _ = _poolings(attn_cfg)
    return project_globals(frame_globals(clip, range(clip.num_frames), video_pooling), params.W_f)


def similarity_matrix(clip, params, attn_cfg=None):
    """
    K x U cosines between every word and every frame, both projected through
    the global layers (`W_g` for words, `W_f` for frame globals).
    """

    params.check_dim(clip.dim)
    words = project_globals(clip.word_matrix, params.W_g)
    frames = projected_frames(clip, params, attn_cfg)
    return np.clip(words @ frames.T, -1.0, 1.0)


def sentence_similarity(clip, params, attn_cfg=None):
    """Cosine of the projected sentence global against each projected frame global."""
    _, text_pooling = _poolings(attn_cfg)
    sentence = project_globals(sentence_global(clip, text_pooling), params.W_g)[0]
    return np.clip(projected_frames(clip, params, attn_cfg) @ sentence, -1.0, 1.0)
