import numpy as np
import pytest

from stground.datamodel import ClipFeatures, LabelBank, LabelClass, SynthConfig, Word, synth_generate
from stground.numcore import Rng


@pytest.fixture(scope='session')
def small_synth_cfg():
    return SynthConfig(
        classes=3, train_clips=12, videos=4, frames_per_video=16,
        U=8, T=4, N=16, dim=16, noise=0.1, planted_cells=4,
        words_per_clip=3, segments_per_video=2, seed=7,
    )


@pytest.fixture(scope='session')
def small_dataset(small_synth_cfg):
    return synth_generate(small_synth_cfg)


@pytest.fixture(scope='session')
def clean_dataset():
    """Noise-free synthetic data in a wide feature space, where planted signals are unambiguous."""
    cfg = SynthConfig(
        classes=4, train_clips=8, videos=6, frames_per_video=20,
        U=8, T=4, N=16, dim=64, noise=0.0, planted_cells=4, seed=11,
    )
    return synth_generate(cfg)


@pytest.fixture
def make_clip():
    def make(grid, frame_global, words, sentence, clip_id='clip0', video_id='video0'):
        words = [Word(f"w{i}", np.asarray(w, dtype=np.float64)) for i, w in enumerate(words)]
        return ClipFeatures(
            video_id, clip_id,
            np.asarray(grid, dtype=np.float64), np.asarray(frame_global, dtype=np.float64),
            words, np.asarray(sentence, dtype=np.float64),
        )
    return make


@pytest.fixture
def random_clip(make_clip):
    def make(seed=0, U=4, N=4, dim=6, K=3, clip_id='clip0'):
        rng = Rng(seed)
        return make_clip(
            rng.child(0).normal((U, N, dim)), rng.child(1).normal((U, dim)),
            rng.child(2).normal((K, dim)), rng.child(3).normal(dim), clip_id=clip_id,
        )
    return make


@pytest.fixture
def make_bank():
    def make(sentences, words=None):
        words = words if words is not None else [[s] for s in sentences]
        return LabelBank([
            LabelClass(c, f"class_{c}", [np.asarray(w, dtype=np.float64) for w in words[c]], np.asarray(s, dtype=np.float64))
            for c, s in enumerate(sentences)
        ])
    return make
