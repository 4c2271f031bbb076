import numpy as np

from .._utils import float32_list, widen_float32
from ..exceptions import SchemaError
from ._grid import grid_side
from ._records import Record, load_jsonl, save_jsonl


class Word:
    def __init__(self, text, vec):
        self.text = text
        self.vec = np.asarray(vec, dtype=np.float64)

    def __repr__(self):
        return f"Word(text='{self.text}')"


class ClipFeatures(Record):
    """
    Token embeddings of one clip: `U` frames of `N` grid tokens, one global
    token per frame, `K` word tokens and a sentence token, all of dim `d`.
    """

    def __init__(
        self, video_id, clip_id, grid, frame_global, words, sentence,
        fps=1.0, start_s=0.0, source='<memory>',
    ):
        self.video_id = str(video_id)
        self.clip_id = str(clip_id)
        self.grid = np.asarray(grid, dtype=np.float64)
        self.frame_global = np.asarray(frame_global, dtype=np.float64)
        self.words = list(words)
        self.sentence = np.asarray(sentence, dtype=np.float64)
        self.fps = float(fps)
        self.start_s = float(start_s)
        self.validate(source)

    def __repr__(self):
        return f"ClipFeatures(clip_id='{self.clip_id}', U={self.num_frames}, N={self.num_cells}, K={self.num_words}, d={self.dim})"

    @property
    def num_frames(self):
        return self.grid.shape[0]

    @property
    def num_cells(self):
        return self.grid.shape[1]

    @property
    def dim(self):
        return self.grid.shape[2]

    @property
    def num_words(self):
        return len(self.words)

    @property
    def word_matrix(self):
        return np.stack([w.vec for w in self.words])

    @property
    def grid_side(self):
        return grid_side(self.num_cells)

    def validate(self, source='<memory>'):
        if self.grid.ndim != 3:
            raise SchemaError(source, 'grid must be U x N x d')
        U, N, d = self.grid.shape
        if U < 1:
            raise SchemaError(source, 'U must be at least 1')
        try:
            grid_side(N)
        except Exception:
            raise SchemaError(source, f"N = {N} is not a perfect square")
        if self.frame_global.shape != (U, d):
            raise SchemaError(source, f"frame_global must be {U} x {d}, got {self.frame_global.shape}")
        if not self.words:
            raise SchemaError(source, 'K must be at least 1')
        for w in self.words:
            if w.vec.shape != (d,):
                raise SchemaError(source, f"word `{w.text}` has dim {w.vec.shape}, expected {d}")
        if self.sentence.shape != (d,):
            raise SchemaError(source, f"sentence has dim {self.sentence.shape}, expected {d}")
        if self.fps <= 0 or self.start_s < 0:
            raise SchemaError(source, 'fps must be positive and start_s non-negative')
        arrays = [self.grid, self.frame_global, self.sentence] + [w.vec for w in self.words]
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise SchemaError(source, 'all values must be finite')

    def to_dict(self):
        U, N, d = self.grid.shape
        return {
            'video_id': self.video_id,
            'clip_id': self.clip_id,
            'dim': d,
            'num_frames': U,
            'num_cells': N,
            'fps': self.fps,
            'start_s': self.start_s,
            'grid': float32_list(self.grid.reshape(U*N, d)),
            'frame_global': float32_list(self.frame_global),
            'words': [{'text': w.text, 'vec': float32_list(w.vec)} for w in self.words],
            'sentence': float32_list(self.sentence),
        }

    @classmethod
    def from_dict(cls, d, source='<memory>', line=None):
        req = lambda field: cls.require(d, field, source, line)
        dim, U, N = int(req('dim')), int(req('num_frames')), int(req('num_cells'))
        grid = req('grid')
        if len(grid) != U*N:
            raise SchemaError(source, f"grid has {len(grid)} vectors, expected U x N = {U*N}", line)
        try:
            grid = widen_float32(grid)
            frame_global = widen_float32(req('frame_global'))
            words = [Word(str(cls.require(w, 'text', source, line)), widen_float32(cls.require(w, 'vec', source, line))) for w in req('words')]
            sentence = widen_float32(req('sentence'))
        except ValueError as e:
            raise SchemaError(source, f"ragged or non-numeric vectors: {e}", line)
        if grid.ndim != 2 or grid.shape[1] != dim:
            raise SchemaError(source, f"grid vectors must have dim {dim}", line)
        return cls(
            video_id=req('video_id'), clip_id=req('clip_id'),
            grid=grid.reshape(U, N, dim), frame_global=frame_global,
            words=words, sentence=sentence,
            fps=d.get('fps', 1.0), start_s=d.get('start_s', 0.0),
            source=source if line is None else f"{source}:{line}",
        )

    def subset(self, frames, clip_id=None):
        """A clip restricted to the given frame indices (in the given order)."""
        frames = list(frames)
        return ClipFeatures(
            self.video_id, clip_id or self.clip_id,
            self.grid[frames], self.frame_global[frames],
            self.words, self.sentence,
            fps=self.fps, start_s=self.start_s + (frames[0]/self.fps if frames else 0.0),
        )


def load_clip_features(path):
    return ClipFeatures.load(path)


def save_clip_features(clip, path, run_config=None):
    clip.save(path, run_config=run_config)


def load_clips(path):
    """Clips stored one per line."""
    return load_jsonl(ClipFeatures, path)


def save_clips(clips, path, run_config=None):
    save_jsonl(clips, path, run_config)
