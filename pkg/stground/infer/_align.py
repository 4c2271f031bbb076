import numpy as np

from .._constants import BACKGROUND
from ..exceptions import InfeasibleAlignmentError
from ..numcore import as_matrix
from ._config import InferConfig
from ._temporal import class_similarity


def align_transcript(sim):
    """
    Monotone alignment of frames to transcript slots maximizing the summed
    similarity. `sim` is frames x slots; every slot gets at least one frame
    and slots are visited in order. On equal scores the frame stays in its
    slot, so each transition happens as early as possible.

    Returns the slot index of every frame.
    """

    sim = as_matrix(sim, 'alignment similarity')
    frames, slots = sim.shape
    if slots == 0 or frames < slots:
        raise InfeasibleAlignmentError(frames, slots)

    score = np.full((frames, slots), -np.inf)
    stay = np.zeros((frames, slots), dtype=bool)
    score[0, 0] = sim[0, 0]
    for f in range(1, frames):
        for s in range(min(f + 1, slots)):
            if s > 0 and score[f - 1, s - 1] > score[f - 1, s]:
                score[f, s] = score[f - 1, s - 1] + sim[f, s]
            else:
                score[f, s] = score[f - 1, s] + sim[f, s]
                stay[f, s] = True

    path = [slots - 1]
    for f in range(frames - 1, 0, -1):
        s = path[-1]
        path.append(s if stay[f, s] else s - 1)
    return path[::-1]


def alignment_score(sim, path):
    sim = np.asarray(sim, dtype=np.float64)
    return float(sum(sim[f, s] for f, s in enumerate(path)))


def transcript_similarity(video, transcript, bank, params, cfg=None, attn_cfg=None):
    """Frames x slots matrix: class cosines for action slots, `background_score` for BACKGROUND slots."""
    cfg = cfg or InferConfig()
    sims = class_similarity(video, bank, params, attn_cfg)
    columns = [
        np.full(sims.shape[0], cfg.background_score) if c == BACKGROUND else sims[:, c]
        for c in transcript
    ]
    return np.stack(columns, axis=1)


def aligned_labels(video, transcript, bank, params, cfg=None, attn_cfg=None):
    """Frame labels and scores read off the transcript alignment."""
    sim = transcript_similarity(video, transcript, bank, params, cfg, attn_cfg)
    path = align_transcript(sim)
    labels = [int(transcript[s]) for s in path]
    scores = [float(sim[f, s]) for f, s in enumerate(path)]
    return labels, scores
