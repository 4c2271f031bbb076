"""
Entropic optimal transport between frames and words.

The plan `Q` (U x K) has rows summing to 1/U and columns summing to 1/K and
takes the form `Diag(alpha) exp(P^T / eps) Diag(beta)`.
"""

import logging

import numpy as np
from scipy.special import logsumexp

from ..exceptions import ConfigError, NotConvergedError, NumericOverflowError
from ..numcore import as_matrix


LOG_DOMAIN_THRESHOLD = 500.0


class SinkhornConfig:
    def __init__(self, epsilon=0.1, max_iters=500, tol=1e-6, log_domain=False):
        self.epsilon = float(epsilon)
        self.max_iters = int(max_iters)
        self.tol = float(tol)
        self.log_domain = bool(log_domain)
        self.validate()

    def __repr__(self):
        return f"SinkhornConfig(epsilon={self.epsilon}, max_iters={self.max_iters}, tol={self.tol}, log_domain={self.log_domain})"

    def validate(self):
        if not self.epsilon > 0:
            raise ConfigError('epsilon', self.epsilon, '> 0')
        if not self.tol > 0:
            raise ConfigError('tol', self.tol, '> 0')
        if self.max_iters < 1:
            raise ConfigError('max_iters', self.max_iters, '>= 1')

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class SinkhornResult:
    def __init__(self, plan, iterations, violation, converged, log_domain):
        self.plan = plan
        self.iterations = iterations
        self.violation = violation
        self.converged = converged
        self.log_domain = log_domain

    def __repr__(self):
        return (
            f"SinkhornResult(shape={self.plan.shape}, iterations={self.iterations}, "
            f"violation={self.violation:.3e}, converged={self.converged})"
        )


def marginal_violation(plan):
    u, k = plan.shape
    rows = np.max(np.abs(plan.sum(axis=1) - 1/u))
    cols = np.max(np.abs(plan.sum(axis=0) - 1/k))
    return float(max(rows, cols))


def _scale(kernel, cfg):
    u, k = kernel.shape
    alpha, beta = np.ones(u), np.ones(k)
    plan, violation = kernel, np.inf
    for it in range(1, cfg.max_iters + 1):
        alpha = (1/u)/(kernel @ beta)
        beta = (1/k)/(kernel.T @ alpha)
        plan = alpha[:, None]*kernel*beta[None, :]
        violation = marginal_violation(plan)
        logging.debug(f"sinkhorn iteration {it}: violation {violation:.3e}")
        if violation < cfg.tol:
            return plan, it, violation
    return plan, cfg.max_iters, violation


def _scale_log(log_kernel, cfg):
    u, k = log_kernel.shape
    f, g = np.zeros(u), np.zeros(k)
    plan, violation = np.exp(log_kernel), np.inf
    for it in range(1, cfg.max_iters + 1):
        f = -np.log(u) - logsumexp(log_kernel + g[None, :], axis=1)
        g = -np.log(k) - logsumexp(log_kernel + f[:, None], axis=0)
        plan = np.exp(f[:, None] + log_kernel + g[None, :])
        violation = marginal_violation(plan)
        logging.debug(f"sinkhorn (log) iteration {it}: violation {violation:.3e}")
        if violation < cfg.tol:
            return plan, it, violation
    return plan, cfg.max_iters, violation


def sinkhorn(P, cfg=None, strict=False):
    """
    Scales `exp(P^T / eps)` onto the transportation polytope for the K x U
    similarity `P`. Runs in the log domain when asked to, or when
    `max|P| / eps` exceeds 500.

    A plan that misses `tol` after `max_iters` is logged and returned with
    `converged=False`; with `strict=True` `NotConvergedError` is raised
    instead, carrying the result.
    """

    cfg = cfg or SinkhornConfig()
    P = as_matrix(P, 'similarity matrix')
    log_kernel = P.T/cfg.epsilon
    log_domain = cfg.log_domain
    if not log_domain and np.max(np.abs(log_kernel)) > LOG_DOMAIN_THRESHOLD:
        logging.warning(f"max|P|/eps = {np.max(np.abs(log_kernel)):.1f} exceeds {LOG_DOMAIN_THRESHOLD}, switching to log domain")
        log_domain = True

    if log_domain:
        plan, iterations, violation = _scale_log(log_kernel, cfg)
    else:
        with np.errstate(over='raise', divide='raise', invalid='raise'):
            try:
                plan, iterations, violation = _scale(np.exp(log_kernel), cfg)
            except FloatingPointError as e:
                raise NumericOverflowError(f"sinkhorn scaling overflowed: {e}")

    result = SinkhornResult(plan, iterations, violation, violation < cfg.tol, log_domain)
    if not result.converged:
        if strict:
            raise NotConvergedError(result)
        logging.warning(f"sinkhorn stopped after {iterations} iterations with marginal violation {violation:.3e}")
    return result
