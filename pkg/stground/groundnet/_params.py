import numpy as np

from .._utils import float32_list, widen_float32
from ..datamodel import Record
from ..exceptions import DimMismatchError, SchemaError
from ..numcore import Rng


class ModelParams(Record):
    """
    The four trainable projections, each `d x d_proj`:
    `W_f`/`W_g` project frame/sentence globals, `W_f_local`/`W_g_local`
    project grid/word tokens.
    """

    NAMES = ('W_f', 'W_g', 'W_f_local', 'W_g_local')

    def __init__(self, W_f, W_g, W_f_local, W_g_local, source='<memory>'):
        self.W_f = np.asarray(W_f, dtype=np.float64)
        self.W_g = np.asarray(W_g, dtype=np.float64)
        self.W_f_local = np.asarray(W_f_local, dtype=np.float64)
        self.W_g_local = np.asarray(W_g_local, dtype=np.float64)
        self.validate(source)

    def __repr__(self):
        return f"ModelParams(d={self.dim}, d_proj={self.proj_dim})"

    @property
    def dim(self):
        return self.W_f.shape[0]

    @property
    def proj_dim(self):
        return self.W_f.shape[1]

    def validate(self, source='<memory>'):
        shape = self.W_f.shape
        for name in self.NAMES:
            m = getattr(self, name)
            if m.ndim != 2 or m.shape != shape:
                raise SchemaError(source, f"`{name}` has shape {m.shape}, expected {shape}")
            if not np.all(np.isfinite(m)):
                raise SchemaError(source, f"`{name}` has non-finite entries")

    def check_dim(self, dim):
        if dim != self.dim:
            raise DimMismatchError(dim, self.dim, 'feature dim vs projection input dim')

    @property
    def matrices(self):
        return {name: getattr(self, name) for name in self.NAMES}

    @classmethod
    def from_matrices(cls, matrices):
        return cls(**{name: matrices[name] for name in cls.NAMES})

    def copy(self):
        return ModelParams.from_matrices({k: v.copy() for k, v in self.matrices.items()})

    def scaled(self, factor, names=NAMES):
        return ModelParams.from_matrices({k: v*factor if k in names else v for k, v in self.matrices.items()})

    @classmethod
    def random(cls, dim, proj_dim=64, seed=0):
        rng = Rng(seed)
        return cls(*[widen_float32(rng.child(i).normal((dim, proj_dim), scale=1/np.sqrt(dim))) for i in range(4)])

    @classmethod
    def identity(cls, dim):
        return cls(*[np.eye(dim) for _ in range(4)])

    def to_dict(self):
        return {
            'dim': self.dim,
            'proj_dim': self.proj_dim,
            **{name: float32_list(getattr(self, name)) for name in self.NAMES},
        }

    @classmethod
    def from_dict(cls, d, source='<memory>', line=None):
        req = lambda field: cls.require(d, field, source, line)
        shape = (int(req('dim')), int(req('proj_dim')))
        matrices = {}
        for name in cls.NAMES:
            m = widen_float32(req(name))
            if m.shape != shape:
                raise SchemaError(source, f"`{name}` has shape {m.shape}, expected {shape}")
            matrices[name] = m
        return cls(**matrices, source=source)


def load_params(path):
    return ModelParams.load(path)


def save_params(params, path, run_config=None):
    params.save(path, run_config=run_config)
