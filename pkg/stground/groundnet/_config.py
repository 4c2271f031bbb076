from .._constants import LayerTypes, Optimizers, Poolings
from ..exceptions import ConfigError


class AttentionConfig:
    """
    Layer stack of the local branch plus pooling choices for the global features.

    The stack needs a cross layer and must end with one, so that text
    queries can be traced back to grid cells.
    """

    DEFAULT_STACK = (LayerTypes.CROSS, LayerTypes.SELF, LayerTypes.CROSS)

    def __init__(self, stack=DEFAULT_STACK, residual_weight=0.5, video_pooling=Poolings.CLS, text_pooling=Poolings.CLS):
        self.stack = tuple(str(layer).lower() for layer in stack)
        self.residual_weight = float(residual_weight)
        self.video_pooling = video_pooling
        self.text_pooling = text_pooling
        self.validate()

    def __repr__(self):
        return f"AttentionConfig(stack={list(self.stack)}, residual_weight={self.residual_weight})"

    def validate(self):
        if any(layer not in LayerTypes.ALL for layer in self.stack):
            raise ConfigError('stack', list(self.stack), f"layers from {LayerTypes.ALL}")
        if not self.stack or self.stack[-1] != LayerTypes.CROSS:
            raise ConfigError('stack', list(self.stack), 'a stack ending with a cross layer')
        if not 0 <= self.residual_weight <= 1:
            raise ConfigError('residual_weight', self.residual_weight, 'a value in [0, 1]')
        if self.video_pooling not in Poolings.VIDEO:
            raise ConfigError('video_pooling', self.video_pooling, f"one of {Poolings.VIDEO}")
        if self.text_pooling not in Poolings.TEXT:
            raise ConfigError('text_pooling', self.text_pooling, f"one of {Poolings.TEXT}")

    def to_dict(self):
        return {
            'stack': list(self.stack),
            'residual_weight': self.residual_weight,
            'video_pooling': self.video_pooling,
            'text_pooling': self.text_pooling,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class TrainConfig:
    def __init__(
        self, batch_size=64, margin=0.1, learning_rate=1e-4, epochs=10,
        use_global=True, use_local=True, optimizer=Optimizers.ADAM, seed=7,
        T=8, reselect_every_epoch=True, proj_dim=64,
    ):
        self.batch_size = int(batch_size)
        self.margin = float(margin)
        self.learning_rate = float(learning_rate)
        self.epochs = int(epochs)
        self.use_global = bool(use_global)
        self.use_local = bool(use_local)
        self.optimizer = optimizer
        self.seed = int(seed)
        self.T = int(T)
        self.reselect_every_epoch = bool(reselect_every_epoch)
        self.proj_dim = int(proj_dim)
        self.validate()

    def __repr__(self):
        return f"TrainConfig({self.to_dict()})"

    def validate(self):
        if self.batch_size < 1:
            raise ConfigError('batch_size', self.batch_size, '>= 1')
        if self.margin < 0:
            raise ConfigError('margin', self.margin, '>= 0')
        # lr = 0 is a valid no-update run
        if self.learning_rate < 0:
            raise ConfigError('learning_rate', self.learning_rate, '>= 0')
        if self.epochs < 0:
            raise ConfigError('epochs', self.epochs, '>= 0')
        if self.optimizer not in Optimizers.ALL:
            raise ConfigError('optimizer', self.optimizer, f"one of {Optimizers.ALL}")
        if self.T < 1:
            raise ConfigError('T', self.T, '>= 1')
        if self.proj_dim < 1:
            raise ConfigError('proj_dim', self.proj_dim, '>= 1')

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)
