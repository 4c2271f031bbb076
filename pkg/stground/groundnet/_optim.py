import numpy as np

from .._constants import Optimizers
from ..exceptions import ConfigError


class SGD:
    def __init__(self, learning_rate):
        self.learning_rate = learning_rate

    def step(self, params, grads):
        return {name: p - self.learning_rate*grads[name] for name, p in params.items()}


class Adam:
    """First/second-moment update with bias correction."""

    def __init__(self, learning_rate, beta1=0.9, beta2=0.999, eps=1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self._t = 0
        self._m = {}
        self._v = {}

    def step(self, params, grads):
        self._t += 1
        updated = {}
        for name in sorted(params):
            g = grads[name]
            m = self._m.get(name, np.zeros_like(g))
            v = self._v.get(name, np.zeros_like(g))
            m = self.beta1*m + (1 - self.beta1)*g
            v = self.beta2*v + (1 - self.beta2)*g*g
            self._m[name], self._v[name] = m, v
            m_hat = m/(1 - self.beta1**self._t)
            v_hat = v/(1 - self.beta2**self._t)
            updated[name] = params[name] - self.learning_rate*m_hat/(np.sqrt(v_hat) + self.eps)
        return updated


def make_optimizer(name, learning_rate):
    if name == Optimizers.SGD:
        return SGD(learning_rate)
    if name == Optimizers.ADAM:
        return Adam(learning_rate)
    raise ConfigError('optimizer', name, f"one of {Optimizers.ALL}")
