import logging

import numpy as np

from ..exceptions import DimMismatchError


class GradBundle:
    """A scalar value with one gradient per named parameter matrix."""

    def __init__(self, value, grads, parts=None):
        self.value = float(value)
        self.parts = dict(parts or {})
        self.grads = {name: np.asarray(g, dtype=np.float64) for name, g in grads.items()}

    def __repr__(self):
        return f"GradBundle(value={self.value:.6g}, grads={sorted(self.grads)})"

    def check_shapes(self, params):
        if set(self.grads) != set(params):
            raise DimMismatchError(sorted(self.grads), sorted(params), 'gradient names differ from parameters')
        for name, p in params.items():
            if self.grads[name].shape != np.shape(p):
                raise DimMismatchError(self.grads[name].shape, np.shape(p), f"gradient shape of `{name}`")
        return self

    @classmethod
    def zeros(cls, params, value=0.0):
        return cls(value, {name: np.zeros_like(p, dtype=np.float64) for name, p in params.items()})

    def __add__(self, other):
        names = set(self.grads) | set(other.grads)
        grads = {}
        for name in sorted(names):
            if name in self.grads and name in other.grads:
                grads[name] = self.grads[name] + other.grads[name]
            else:
                grads[name] = self.grads.get(name, other.grads.get(name))
        parts = {k: self.parts.get(k, 0.0) + other.parts.get(k, 0.0) for k in sorted(set(self.parts) | set(other.parts))}
        return GradBundle(self.value + other.value, grads, parts)


def finite_diff_check(loss_fn, params, step=1e-5, analytic=None):
    """
    Compares analytic gradients against central differences.

    `loss_fn(params)` returns either a `GradBundle` (its grads are the
    analytic ones) or a plain scalar, in which case `analytic` must be given.
    Returns the worst relative error over every coordinate of every matrix,
    `|analytic - central| / max(1e-8, |analytic| + |central|)`.
    """

    params = {name: np.array(p, dtype=np.float64) for name, p in params.items()}

    def value_of(p):
        out = loss_fn(p)
        return out.value if isinstance(out, GradBundle) else float(out)

    if analytic is None:
        analytic = loss_fn(params).grads
    worst = 0.0
    for name in sorted(params):
        p = params[name]
        g = np.asarray(analytic[name], dtype=np.float64)
        central = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            original = p[idx]
            p[idx] = original + step
            up = value_of(params)
            p[idx] = original - step
            down = value_of(params)
            p[idx] = original
            central[idx] = (up - down)/(2*step)
        err = np.abs(g - central)/np.maximum(1e-8, np.abs(g) + np.abs(central))
        if err.size:
            worst = max(worst, float(err.max()))
    logging.debug(f"finite difference check: max relative error {worst:.3e}")
    return worst
