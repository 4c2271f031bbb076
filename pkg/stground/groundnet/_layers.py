"""
Differentiable building blocks of the local and global branches.

Every op returns its output together with a `backward` closure mapping the
output gradient to input gradients. Attention layers carry no parameters.
"""

import numpy as np

from ..numcore import ZERO_NORM, softmax
from ..exceptions import ZeroVectorError


def normalize_rows_op(x):
    norms = np.sqrt(np.sum(x*x, axis=-1, keepdims=True))
    if np.any(norms < ZERO_NORM):
        raise ZeroVectorError(float(norms.min()), 'a token was annihilated by its projection')
    y = x/norms

    def backward(dy):
        return (dy - y*np.sum(dy*y, axis=-1, keepdims=True))/norms

    return y, backward


def project_op(x, w):
    """Row-wise `normalize(x @ w)`; backward returns the gradient of `w`."""
    y, back_norm = normalize_rows_op(x @ w)

    def backward(dy):
        return x.T @ back_norm(dy)

    return y, backward


def _softmax_backward(p, dp):
    return p*(dp - np.sum(dp*p, axis=-1, keepdims=True))


def cross_layer(video, text):
    """
    Cosine cross-attention run in both directions on the same inputs.

    Returns the contextual video tokens (each a mixture of text tokens),
    the contextual text tokens, `A_vs` (M x K) and `A_sv` (K x M).
    """

    vn, back_v = normalize_rows_op(video)
    tn, back_t = normalize_rows_op(text)
    e = vn @ tn.T
    a_vs = softmax(e, axis=1)
    a_sv = softmax(e.T, axis=1)
    video_out = a_vs @ text
    text_out = a_sv @ video

    def backward(d_video_out, d_text_out):
        d_text = a_vs.T @ d_video_out
        d_video = a_sv.T @ d_text_out
        de = _softmax_backward(a_vs, d_video_out @ text.T) + _softmax_backward(a_sv, d_text_out @ video.T).T
        d_video = d_video + back_v(de @ tn)
        d_text = d_text + back_t(de.T @ vn)
        return d_video, d_text

    return video_out, text_out, a_vs, a_sv, backward


def self_layer(tokens):
    """Scaled dot-product self-attention with K = Q = V = tokens."""

    scale = 1/np.sqrt(tokens.shape[1])
    a = softmax((tokens @ tokens.T)*scale, axis=1)
    out = a @ tokens

    def backward(d_out):
        d_tokens = a.T @ d_out
        dl = _softmax_backward(a, d_out @ tokens.T)*scale
        return d_tokens + (dl + dl.T) @ tokens

    return out, a, backward


def mean_normalize_op(tokens):
    """Mean over rows followed by L2 normalization."""
    mean = tokens.mean(axis=0)
    y, back_norm = normalize_rows_op(mean[None, :])
    n = tokens.shape[0]

    def backward(dy):
        d_mean = back_norm(dy[None, :])[0]
        return np.broadcast_to(d_mean/n, tokens.shape).copy()

    return y[0], backward
