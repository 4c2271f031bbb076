import numpy as np

from .._constants import LayerTypes
from ..exceptions import DimMismatchError
from ._layers import cross_layer, normalize_rows_op, self_layer
from ..numcore import softmax


class AttentionTrace:
    """
    Attention matrices of one forward pass, in stack order.

    Cross layers record `A_vs` (TN x K) and `A_sv` (K x TN); self layers
    record `A_video` (TN x TN) and `A_text` (K x K).
    """

    def __init__(self, num_frames, num_cells):
        self.num_frames = int(num_frames)
        self.num_cells = int(num_cells)
        self.layers = []

    def __repr__(self):
        return f"AttentionTrace(layers={[layer['type'] for layer in self.layers]})"

    def add_cross(self, a_vs, a_sv):
        self.layers.append({'type': LayerTypes.CROSS, 'A_vs': a_vs, 'A_sv': a_sv})

    def add_self(self, a_video, a_text):
        self.layers.append({'type': LayerTypes.SELF, 'A_video': a_video, 'A_text': a_text})

    def matrices(self):
        for layer in self.layers:
            for key, value in layer.items():
                if key != 'type':
                    yield key, value

    @property
    def last_cross(self):
        for layer in reversed(self.layers):
            if layer['type'] == LayerTypes.CROSS:
                return layer
        return None


def cross_attention(queries, keys_values):
    """
    Parameter-free cosine attention of `queries` (M x d') over `keys_values` (L x d').

    Returns `(contextual, A)` with `A = row_softmax(cosine(q, kv))` and
    `contextual = A @ keys_values`.
    """

    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    keys_values = np.atleast_2d(np.asarray(keys_values, dtype=np.float64))
    if queries.shape[1] != keys_values.shape[1]:
        raise DimMismatchError(queries.shape, keys_values.shape, 'queries vs keys')
    e = normalize_rows_op(queries)[0] @ normalize_rows_op(keys_values)[0].T
    a = softmax(e, axis=1)
    return a @ keys_values, a


def self_attention(tokens):
    tokens = np.atleast_2d(np.asarray(tokens, dtype=np.float64))
    out, a, _ = self_layer(tokens)
    return out, a


def run_stack(video, text, stack, trace=None):
    """
    Runs the layer stack over projected video and text tokens.

    Returns the final tokens and a backward closure taking the gradients of
    both final token sets.
    """

    backwards = []
    for layer in stack:
        if layer == LayerTypes.CROSS:
            video, text, a_vs, a_sv, back = cross_layer(video, text)
            backwards.append(back)
            if trace is not None:
                trace.add_cross(a_vs, a_sv)
        else:
            video, a_video, back_v = self_layer(video)
            text, a_text, back_t = self_layer(text)
            backwards.append(lambda dv, dt, bv=back_v, bt=back_t: (bv(dv), bt(dt)))
            if trace is not None:
                trace.add_self(a_video, a_text)

    def backward(d_video, d_text):
        for back in reversed(backwards):
            d_video, d_text = back(d_video, d_text)
        return d_video, d_text

    return video, text, backward
