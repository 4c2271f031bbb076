"""
Synthetic clips, videos and label bank with planted ground truth.

Each class owns a unit prototype. Planted frames and cells carry
`signal * prototype + N(0, noise^2)` renormalized; everything else is a
random unit vector. The generator records exactly what it planted.
"""

import logging
import math

import numpy as np

from .._constants import BACKGROUND
from .._utils import widen_float32
from ..exceptions import ConfigError
from ..numcore import Rng
from ._bank import LabelBank, LabelClass
from ._clip import ClipFeatures, Word
from ._grid import cell_index, cells_box, grid_side
from ._gt import GtSegment, VideoGt


class SynthConfig:
    def __init__(
        self, classes=4, train_clips=200, videos=50, frames_per_video=24,
        U=16, T=8, N=49, dim=32, signal=1.0, noise=0.1, planted_cells=4,
        words_per_clip=4, sentence_signal=0.25, segments_per_video=2,
        width=224, height=224, fps=1.0, seed=7,
    ):
        self.classes = int(classes)
        self.train_clips = int(train_clips)
        self.videos = int(videos)
        self.frames_per_video = int(frames_per_video)
        self.U = int(U)
        self.T = int(T)
        self.N = int(N)
        self.dim = int(dim)
        self.signal = float(signal)
        self.noise = float(noise)
        self.planted_cells = int(planted_cells)
        self.words_per_clip = int(words_per_clip)
        self.sentence_signal = float(sentence_signal)
        self.segments_per_video = int(segments_per_video)
        self.width = float(width)
        self.height = float(height)
        self.fps = float(fps)
        self.seed = int(seed)
        self.validate()

    def __repr__(self):
        return f"SynthConfig({self.to_dict()})"

    def validate(self):
        for field in ('classes', 'U', 'T', 'N', 'dim', 'planted_cells', 'words_per_clip', 'segments_per_video'):
            if getattr(self, field) < 1:
                raise ConfigError(field, getattr(self, field), 'a positive count')
        for field in ('train_clips', 'videos'):
            if getattr(self, field) < 0:
                raise ConfigError(field, getattr(self, field), 'a non-negative count')
        if self.T > self.U:
            raise ConfigError('T', self.T, f"at most U = {self.U}")
        if math.isqrt(self.N)**2 != self.N:
            raise ConfigError('N', self.N, 'a perfect square')
        if self.planted_cells > self.N:
            raise ConfigError('planted_cells', self.planted_cells, f"at most N = {self.N}")
        if self.signal <= 0:
            raise ConfigError('signal', self.signal, '> 0')
        if self.noise < 0:
            raise ConfigError('noise', self.noise, '>= 0')
        if not 0 < self.sentence_signal <= 1:
            raise ConfigError('sentence_signal', self.sentence_signal, 'in (0, 1]')
        if self.frames_per_video < 2*self.segments_per_video + 1:
            raise ConfigError('frames_per_video', self.frames_per_video, 'room for every segment and a background gap')
        if self.width <= 0 or self.height <= 0 or self.fps <= 0:
            raise ConfigError('width/height/fps', (self.width, self.height, self.fps), 'positive values')

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls().__dict__)
        if unknown:
            raise ConfigError('synth', sorted(unknown), 'known SynthConfig fields')
        return cls(**d)


class SynthDataset:
    def __init__(self, clips, clip_gt, videos, gt, bank):
        self.clips = clips
        self.clip_gt = clip_gt
        self.videos = videos
        self.gt = gt
        self.bank = bank

    def __repr__(self):
        return f"SynthDataset(clips={len(self.clips)}, videos={len(self.videos)}, classes={len(self.bank)})"


def _planted(prototype, cfg, rng, n=None):
    shape = prototype.shape if n is None else (n, prototype.shape[0])
    v = cfg.signal*prototype + rng.normal(shape, scale=cfg.noise)
    if n is None:
        return v/np.linalg.norm(v)
    return v/np.linalg.norm(v, axis=1, keepdims=True)


def _cell_block(cfg, rng):
    """`planted_cells` cells taken row-major from a square block anchored at random."""
    side = grid_side(cfg.N)
    block = math.isqrt(cfg.planted_cells - 1) + 1
    block = min(block, side)
    r0 = int(rng.integers(0, side - block + 1))
    c0 = int(rng.integers(0, side - block + 1))
    cells = [cell_index(r0 + i//block, c0 + i % block, side) for i in range(cfg.planted_cells)]
    return cells


def _frames(cfg, rng, num_frames, planting):
    """`planting` maps frame -> (prototype, cells)."""
    grid = rng.unit_vectors(num_frames*cfg.N, cfg.dim).reshape(num_frames, cfg.N, cfg.dim)
    frame_global = rng.unit_vectors(num_frames, cfg.dim)
    for f in sorted(planting):
        prototype, cells = planting[f]
        grid[f, cells] = _planted(prototype, cfg, rng, len(cells))
        frame_global[f] = _planted(prototype, cfg, rng)
    return widen_float32(grid), widen_float32(frame_global)


def _noisy_sentence(prototype, cfg, rng):
    # cosine with the prototype is exactly `sentence_signal`
    z = rng.normal(prototype.shape)
    z -= np.dot(z, prototype)*prototype
    z /= np.linalg.norm(z)
    rho = cfg.sentence_signal
    return rho*prototype + math.sqrt(max(0.0, 1 - rho*rho))*z


def _make_bank(cfg, prototypes, rng):
    classes = []
    for c, prototype in enumerate(prototypes):
        r = rng.child(c)
        classes.append(LabelClass(
            c, f"action_{c}",
            [widen_float32(_planted(prototype, cfg, r))],
            widen_float32(_planted(prototype, cfg, r)),
        ))
    return LabelBank(classes)


def _make_train_clip(i, cfg, prototypes, rng):
    c = int(rng.integers(0, cfg.classes))
    offset = int(rng.integers(0, cfg.U - cfg.T + 1))
    cells = _cell_block(cfg, rng)
    frames = range(offset, offset + cfg.T)
    grid, frame_global = _frames(cfg, rng, cfg.U, {f: (prototypes[c], cells) for f in frames})

    carrier = int(rng.integers(0, cfg.words_per_clip))
    noise_words = rng.unit_vectors(cfg.words_per_clip, cfg.dim)
    words = []
    for k in range(cfg.words_per_clip):
        if k == carrier:
            words.append(Word(f"action_{c}", widen_float32(_planted(prototypes[c], cfg, rng))))
        else:
            words.append(Word(f"noise_{k}", widen_float32(noise_words[k])))
    sentence = widen_float32(_noisy_sentence(prototypes[c], cfg, rng))

    video_id = f"train{i:04d}"
    clip = ClipFeatures(video_id, f"{video_id}_c0", grid, frame_global, words, sentence, fps=cfg.fps)
    side = grid_side(cfg.N)
    box = cells_box(cells, side, cfg.width, cfg.height)
    gt = VideoGt(video_id, cfg.width, cfg.height, cfg.U, [GtSegment(c, offset, offset + cfg.T, [box]*cfg.T)])
    return clip, gt


def _segment_layout(cfg, rng):
    S, F = cfg.segments_per_video, cfg.frames_per_video
    longest = max(1, (F - (S - 1)) // (S + 1))
    lengths = [int(rng.integers(max(1, longest//2), longest + 1)) for _ in range(S)]
    background = F - sum(lengths) - (S - 1)
    weights = rng.random(S + 1) + 1e-3
    gaps = np.floor(background*weights/weights.sum()).astype(int)
    gaps[-1] += background - gaps.sum()
    gaps[1:S] += 1
    layout, cursor = [], int(gaps[0])
    for s in range(S):
        layout.append((cursor, cursor + lengths[s]))
        cursor += lengths[s] + int(gaps[s + 1])
    return layout


def _make_video(v, cfg, prototypes, rng):
    layout = _segment_layout(cfg, rng)
    if len(layout) <= cfg.classes:
        classes = [int(c) for c in rng.permutation(cfg.classes)[:len(layout)]]
    else:
        classes = [int(c) for c in rng.integers(0, cfg.classes, size=len(layout))]
    side = grid_side(cfg.N)
    planting, segments = {}, []
    for (start, end), c in zip(layout, classes):
        cells = _cell_block(cfg, rng)
        for f in range(start, end):
            planting[f] = (prototypes[c], cells)
        box = cells_box(cells, side, cfg.width, cfg.height)
        segments.append(GtSegment(c, start, end, [box]*(end - start)))
    grid, frame_global = _frames(cfg, rng, cfg.frames_per_video, planting)

    noise_words = rng.unit_vectors(cfg.words_per_clip, cfg.dim)
    words = [Word(f"noise_{k}", widen_float32(noise_words[k])) for k in range(cfg.words_per_clip)]
    sentence = widen_float32(noise_words.mean(axis=0))
    video_id = f"video{v:04d}"
    video = ClipFeatures(video_id, f"{video_id}_full", grid, frame_global, words, sentence, fps=cfg.fps)
    gt = VideoGt(video_id, cfg.width, cfg.height, cfg.frames_per_video, segments)
    return video, gt


def synth_generate(cfg):
    """Deterministic in `cfg.seed`; every item draws from its own child stream."""

    rng = Rng(cfg.seed)
    prototypes = rng.child(0).unit_vectors(cfg.classes, cfg.dim)
    bank = _make_bank(cfg, prototypes, rng.child(1))

    clips, clip_gt = [], []
    for i in range(cfg.train_clips):
        clip, gt = _make_train_clip(i, cfg, prototypes, rng.child(2, i))
        clips.append(clip)
        clip_gt.append(gt)

    videos, gt = [], []
    for v in range(cfg.videos):
        video, video_gt = _make_video(v, cfg, prototypes, rng.child(3, v))
        videos.append(video)
        gt.append(video_gt)

    logging.info(f"generated {len(clips)} training clips and {len(videos)} videos over {cfg.classes} classes")
    return SynthDataset(clips, clip_gt, videos, gt, bank)
