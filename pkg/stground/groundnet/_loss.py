import numpy as np

from ..numcore import GradBundle, log_softmax, softmax
from ._attention import run_stack
from ._config import AttentionConfig
from ._layers import mean_normalize_op, project_op
from ._project import frame_globals, sentence_global


def _stack_pairs(pairs):
    if isinstance(pairs, tuple) and len(pairs) == 2 and np.ndim(pairs[0]) == 2:
        return np.asarray(pairs[0], dtype=np.float64), np.asarray(pairs[1], dtype=np.float64)
    x = np.stack([np.asarray(p[0], dtype=np.float64) for p in pairs])
    y = np.stack([np.asarray(p[1], dtype=np.float64) for p in pairs])
    return x, y


def nce_loss_and_grads(x, y, margin=0.1):
    """
    Symmetric margin NCE over a batch of paired unit vectors `x`, `y` (B x d').

    Row l contrasts `x_l` against every `y_k`, column l contrasts `y_l`
    against every `x_k`; the positive logit is reduced by `margin`.
    Returns `(loss, d_x, d_y)`.
    """

    b = x.shape[0]
    logits = x @ y.T - margin*np.eye(b)
    rows = log_softmax(logits, axis=1)
    cols = log_softmax(logits, axis=0)
    loss = -(np.trace(rows) + np.trace(cols))/b
    d_logits = (softmax(logits, axis=1) + softmax(logits, axis=0) - 2*np.eye(b))/b
    return float(loss), d_logits @ y, d_logits.T @ x


def nce_loss(pairs, margin=0.1):
    """`pairs` is a sequence of `(X_l, Y_l)` or a tuple of two B x d' arrays."""
    x, y = _stack_pairs(pairs)
    return nce_loss_and_grads(x, y, margin)[0]


def _item_forward(clip, frames, params, attn_cfg, need_global, need_local):
    """Forward pass of one training item, keeping the closures for backprop."""

    out = {}
    if need_global:
        f_tokens, back_f = project_op(frame_globals(clip, frames, attn_cfg.video_pooling), params.W_f)
        v_global, back_vmean = mean_normalize_op(f_tokens)
        s_global, back_s = project_op(sentence_global(clip, attn_cfg.text_pooling)[None, :], params.W_g)
        out['global'] = (v_global, s_global[0])

        def back_global(dv, ds):
            return {
                'W_f': back_f(back_vmean(dv)),
                'W_g': back_s(ds[None, :]),
            }

        out['back_global'] = back_global
    if need_local:
        tokens = clip.grid[list(frames)].reshape(-1, clip.dim)
        video, back_video = project_op(tokens, params.W_f_local)
        text, back_text = project_op(clip.word_matrix, params.W_g_local)
        video, text, back_stack = run_stack(video, text, attn_cfg.stack)
        v_bar, back_vbar = mean_normalize_op(video)
        s_bar, back_sbar = mean_normalize_op(text)
        out['local'] = (v_bar, s_bar)

        def back_local(dv, ds):
            d_video, d_text = back_stack(back_vbar(dv), back_sbar(ds))
            return {
                'W_f_local': back_video(d_video),
                'W_g_local': back_text(d_text),
            }

        out['back_local'] = back_local
    return out


def total_loss_and_grads(batch, params, train_cfg, attn_cfg=None):
    """
    Summed global and local NCE over a batch of `(clip, selected_frames)`
    items, with gradients for all four projections.

    Disabled terms contribute zero loss and zero gradient. Gradients are
    accumulated in batch order.
    """

    attn_cfg = attn_cfg or AttentionConfig()
    bundle = GradBundle.zeros(params.matrices)
    parts = {'global': 0.0, 'local': 0.0}
    if not batch or not (train_cfg.use_global or train_cfg.use_local):
        bundle.parts = parts
        return bundle

    items = [
        _item_forward(clip, list(frames), params, attn_cfg, train_cfg.use_global, train_cfg.use_local)
        for clip, frames in batch
    ]
    for branch, enabled in (('global', train_cfg.use_global), ('local', train_cfg.use_local)):
        if not enabled:
            continue
        x = np.stack([item[branch][0] for item in items])
        y = np.stack([item[branch][1] for item in items])
        loss, dx, dy = nce_loss_and_grads(x, y, train_cfg.margin)
        parts[branch] = loss
        bundle.value += loss
        for i, item in enumerate(items):
            for name, grad in item[f"back_{branch}"](dx[i], dy[i]).items():
                bundle.grads[name] += grad
    bundle.parts = parts
    return bundle


def total_loss(batch, params, train_cfg, attn_cfg=None):
    """Forward-only variant of `total_loss_and_grads`: `{'global', 'local', 'total'}`."""

    attn_cfg = attn_cfg or AttentionConfig()
    parts = {'global': 0.0, 'local': 0.0}
    if batch and (train_cfg.use_global or train_cfg.use_local):
        items = [
            _item_forward(clip, list(frames), params, attn_cfg, train_cfg.use_global, train_cfg.use_local)
            for clip, frames in batch
        ]
        for branch, enabled in (('global', train_cfg.use_global), ('local', train_cfg.use_local)):
            if enabled:
                x = np.stack([item[branch][0] for item in items])
                y = np.stack([item[branch][1] for item in items])
                parts[branch] = nce_loss_and_grads(x, y, train_cfg.margin)[0]
    parts['total'] = parts['global'] + parts['local']
    return parts
