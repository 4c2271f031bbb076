from ..exceptions import ConfigError


MAX_ANNOTATORS = 5


class BenchConfig:
    def __init__(self, majority_k=3, bbox_margin_frac=0.05, widespread_area_A=60000.0):
        self.majority_k = int(majority_k)
        self.bbox_margin_frac = float(bbox_margin_frac)
        self.widespread_area_A = float(widespread_area_A)
        self.validate()

    def __repr__(self):
        return f"BenchConfig({self.to_dict()})"

    def validate(self):
        if not 1 <= self.majority_k <= MAX_ANNOTATORS:
            raise ConfigError('majority_k', self.majority_k, f"a count in [1, {MAX_ANNOTATORS}]")
        if self.bbox_margin_frac < 0:
            raise ConfigError('bbox_margin_frac', self.bbox_margin_frac, '>= 0')
        if self.widespread_area_A < 0:
            raise ConfigError('widespread_area_A', self.widespread_area_A, '>= 0')

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)
