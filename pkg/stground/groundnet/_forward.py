from ._attention import AttentionTrace, run_stack
from ._config import AttentionConfig
from ._project import project_globals, project_tokens


def local_forward(clip, selected_frames, params, attn_cfg=None, words=None):
    """
    Local branch forward pass.

    `words` overrides the clip's word vectors (raw, d-dimensional), which is
    how inference feeds the label bank vocabulary. Returns `V_bar`, `S_bar`
    (mean-pooled final tokens) and the attention trace.
    """

    attn_cfg = attn_cfg or AttentionConfig()
    selected_frames = list(selected_frames)
    projected = project_tokens(clip, selected_frames, params, attn_cfg)
    text = projected['words']
    if words is not None:
        text = project_globals(words, params.W_g_local)
    trace = AttentionTrace(len(selected_frames), clip.num_cells)
    video, text, _ = run_stack(projected['video'], text, attn_cfg.stack, trace)
    return {
        'V_bar': video.mean(axis=0),
        'S_bar': text.mean(axis=0),
        'trace': trace,
    }
