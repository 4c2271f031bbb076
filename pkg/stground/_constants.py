BACKGROUND = -1
FORMAT_VERSION = 1


class SelectionStrategies:
    NONE = 'none'
    GLOBAL = 'global'
    LOCAL = 'local'
    SINKHORN = 'sinkhorn'

    ALL = (NONE, GLOBAL, LOCAL, SINKHORN)

    @staticmethod
    def is_valid(strategy):
        return strategy in SelectionStrategies.ALL


class LayerTypes:
    CROSS = 'cross'
    SELF = 'self'

    ALL = (CROSS, SELF)


class Poolings:
    CLS = 'cls'
    MEAN = 'mean'
    MAX = 'max'

    VIDEO = (CLS, MEAN)
    TEXT = (CLS, MAX)


class Optimizers:
    SGD = 'sgd'
    ADAM = 'adaptive-moments'

    ALL = (SGD, ADAM)


class Metrics:
    POINTING_GAME = 'pg'
    SPATIAL_MAP = 'smap'
    VIDEO_MAP = 'vmap'
    IOU_POINTING_GAME = 'ioupg'
    TEMPORAL = 'temporal'

    ALL = (POINTING_GAME, SPATIAL_MAP, VIDEO_MAP, IOU_POINTING_GAME, TEMPORAL)
