from ..exceptions import ConfigError


class InferConfig:
    """
    `theta_temporal` filters background frames by their best class cosine,
    `tau_spatial` binarizes heatmaps, `background_score` is the per-frame
    score of a BACKGROUND transcript slot. `width`/`height` give the frame
    geometry used for argmax points when no ground truth supplies it.
    """

    def __init__(self, theta_temporal=0.5, tau_spatial=0.01, background_score=0.5, width=224, height=224):
        self.theta_temporal = float(theta_temporal)
        self.tau_spatial = float(tau_spatial)
        self.background_score = float(background_score)
        self.width = float(width)
        self.height = float(height)
        self.validate()

    def __repr__(self):
        return f"InferConfig(theta_temporal={self.theta_temporal}, tau_spatial={self.tau_spatial})"

    def validate(self):
        if not -1 <= self.theta_temporal <= 1:
            raise ConfigError('theta_temporal', self.theta_temporal, 'a value in [-1, 1]')
        if not 0 <= self.tau_spatial <= 1:
            raise ConfigError('tau_spatial', self.tau_spatial, 'a value in [0, 1]')
        if self.width <= 0 or self.height <= 0:
            raise ConfigError('width/height', (self.width, self.height), 'positive frame geometry')

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)
