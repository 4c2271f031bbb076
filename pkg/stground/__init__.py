from ._constants import BACKGROUND, LayerTypes, Metrics, Optimizers, Poolings, SelectionStrategies
from .datamodel import ClipFeatures, LabelBank, SynthConfig, VideoGt, synth_generate
from .otselect import SinkhornConfig, select_frames, sinkhorn
from .groundnet import AttentionConfig, ModelParams, TrainConfig, Trainer, train
from .infer import InferConfig, align_transcript, st_ground, temporal_classify
from .metrics import EvalReport, evaluate
from .benchtools import BenchConfig, qc_sample_size

__version__ = '0.1.0'
