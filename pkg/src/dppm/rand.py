"""Seedable random variates and exact log-densities for the samplers.

Everything draws through a single ``numpy.random.Generator`` so that a chain
is reproducible bit-for-bit from its seed.  The matrix-variate samplers are
written out explicitly (Bartlett construction for the Wishart family) rather
than delegated to ``scipy.stats`` so the variate stream is under our control;
``scipy.special`` supplies the log-gamma machinery for the normalizing
constants.

Parameterization conventions, used consistently across the package:

* ``gamma(shape, scale)``: density ``x**(shape-1) * exp(-x/scale)``.
* ``inverse_gamma(shape, scale)``: density ``x**-(shape+1) * exp(-scale/x)``.
* ``inverse_wishart(dof, scale)``: standard IW with mean ``scale/(dof-d-1)``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, multigammaln

__all__ = [
    "FactorizationError",
    "make_rng",
    "spawn_rng",
    "cholesky_spd",
    "ensure_spd",
    "sample_mvn",
    "sample_wishart",
    "sample_inverse_wishart",
    "sample_inverse_gamma",
    "sample_gamma",
    "sample_beta",
    "sample_dirichlet",
    "sample_categorical",
    "log_sum_exp",
    "logpdf_mvn",
    "logpdf_inverse_wishart",
    "logpdf_inverse_gamma",
    "logpdf_gamma",
    "logpdf_dirichlet",
]

LOG_2PI = math.log(2.0 * math.pi)

# Symmetry tolerance for matrices that must be SPD.
SYM_TOL = 1e-10


class FactorizationError(np.linalg.LinAlgError):
    """Raised when a matrix that must be SPD cannot be factorized."""


def make_rng(seed):
    """Return a deterministic generator for ``seed`` (PCG64)."""
    return np.random.default_rng(seed)


def spawn_rng(master_seed, *key):
    """Derive an independent generator from ``(master_seed, *key)``.

    Parallel chains each get their own stream; the derivation depends only
    on the integers supplied, never on scheduling order.
    """
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, key)]))


def cholesky_spd(mat, name="matrix"):
    """Lower-triangular Cholesky factor of an SPD matrix.

    A failed factorization is retried once with a diagonal jitter of
    ``1e-9 * trace/d``; a second failure raises :class:`FactorizationError`
    naming the offending matrix.
    """
    mat = np.asarray(mat, dtype=float)
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        pass
    d = mat.shape[0]
    jitter = 1e-9 * np.trace(mat) / d
    try:
        return np.linalg.cholesky(mat + jitter * np.eye(d))
    except np.linalg.LinAlgError:
        raise FactorizationError(
            f"{name} is not positive definite (Cholesky failed even after "
            f"jitter {jitter:.3e}): {mat!r}"
        ) from None


def ensure_spd(mat, name="matrix", sym_tol=SYM_TOL):
    """Validate that ``mat`` is symmetric (within ``sym_tol``) and SPD.

    Returns the matrix as a float array.  Raises ``ValueError`` on asymmetry
    and :class:`FactorizationError` if the Cholesky factorization fails.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    if np.max(np.abs(mat - mat.T)) > sym_tol:
        raise ValueError(f"{name} is not symmetric within {sym_tol:g}")
    cholesky_spd(mat, name=name)
    return mat


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def sample_mvn(mean, cov, rng):
    """Draw from N(mean, cov) via the lower Cholesky factor of ``cov``."""
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (mean.size, mean.size):
        raise ValueError(
            f"covariance shape {cov.shape} does not match mean length {mean.size}"
        )
    chol = cholesky_spd(cov, name="covariance")
    return mean + chol @ rng.standard_normal(mean.size)


def sample_wishart(dof, scale, rng):
    """Draw from Wishart(dof, scale) by the Bartlett construction.

    Requires ``dof > d - 1`` (non-integer degrees of freedom allowed).
    """
    scale = np.asarray(scale, dtype=float)
    d = scale.shape[0]
    if dof <= d - 1:
        raise ValueError(f"Wishart needs dof > d-1 = {d - 1}, got {dof}")
    chol = cholesky_spd(scale, name="Wishart scale")
    bart = np.zeros((d, d))
    for j in range(d):
        bart[j, j] = math.sqrt(rng.chisquare(dof - j))
    idx = np.tril_indices(d, -1)
    bart[idx] = rng.standard_normal(len(idx[0]))
    factor = chol @ bart
    return factor @ factor.T


def sample_inverse_wishart(dof, scale, rng):
    """Draw from IW(dof, scale): invert a Wishart draw on the inverted scale.

    The result is symmetrized to guard against round-off asymmetry.
    """
    scale = np.asarray(scale, dtype=float)
    d = scale.shape[0]
    if dof <= d - 1:
        raise ValueError(f"inverse-Wishart needs dof > d-1 = {d - 1}, got {dof}")
    chol = cholesky_spd(scale, name="inverse-Wishart scale")
    inv_scale = np.linalg.inv(chol.T) @ np.linalg.inv(chol)
    draw = np.linalg.inv(sample_wishart(dof, inv_scale, rng))
    return 0.5 * (draw + draw.T)


def sample_inverse_gamma(shape, scale, rng):
    """Draw from IG(shape, scale), density ``x**-(shape+1) exp(-scale/x)``."""
    if shape <= 0 or scale <= 0:
        raise ValueError(f"inverse-gamma needs positive parameters, got ({shape}, {scale})")
    return 1.0 / rng.gamma(shape, 1.0 / scale)


def sample_gamma(shape, scale, rng):
    """Draw from Gamma(shape, scale) (scale parameterization)."""
    if shape <= 0 or scale <= 0:
        raise ValueError(f"gamma needs positive parameters, got ({shape}, {scale})")
    return rng.gamma(shape, scale)


def sample_beta(a, b, rng):
    """Draw from Beta(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError(f"beta needs positive parameters, got ({a}, {b})")
    return rng.beta(a, b)


def sample_dirichlet(concentrations, rng):
    """Draw from Dirichlet(concentrations); the result sums to one."""
    conc = np.asarray(concentrations, dtype=float)
    if conc.size == 0 or np.any(conc <= 0):
        raise ValueError(f"Dirichlet needs positive concentrations, got {conc}")
    return rng.dirichlet(conc)


def sample_categorical(log_weights, rng):
    """Sample an index proportional to ``exp(log_weights)``.

    Weights are normalized internally through :func:`log_sum_exp`, so any
    common shift of the inputs leaves the distribution unchanged.
    """
    logw = np.asarray(log_weights, dtype=float)
    if logw.size == 0:
        raise ValueError("categorical needs at least one weight")
    if not np.any(np.isfinite(logw)):
        raise ValueError("all categorical log-weights are -inf")
    probs = np.exp(logw - log_sum_exp(logw))
    cum = np.cumsum(probs)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="left"))


def log_sum_exp(values):
    """Stable ``log(sum(exp(values)))``.

    Tolerates ``-inf`` entries mixed with finite ones (they contribute zero
    mass) and returns ``-inf`` if every entry is ``-inf``.
    """
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise ValueError("log_sum_exp of an empty vector")
    top = np.max(vals)
    if not np.isfinite(top):
        # all -inf (a +inf or NaN input is the caller's bug and propagates)
        return top
    return top + math.log(np.sum(np.exp(vals - top)))


# ---------------------------------------------------------------------------
# log-densities (all normalizing constants included)
# ---------------------------------------------------------------------------

def logpdf_mvn(x, mean, cov):
    """Log-density of N(mean, cov) at ``x``."""
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    d = mean.size
    chol = cholesky_spd(cov, name="covariance")
    diff = x - mean
    sol = np.linalg.solve(chol, diff)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (d * LOG_2PI + log_det + sol @ sol)


def logpdf_inverse_wishart(x, dof, scale):
    """Log-density of IW(dof, scale) at the matrix ``x``.

    Returns ``-inf`` when ``x`` is not symmetric positive definite.
    """
    x = np.asarray(x, dtype=float)
    scale = np.asarray(scale, dtype=float)
    d = scale.shape[0]
    if dof <= d - 1:
        raise ValueError(f"inverse-Wishart needs dof > d-1 = {d - 1}, got {dof}")
    scale_chol = cholesky_spd(scale, name="inverse-Wishart scale")
    if np.max(np.abs(x - x.T)) > SYM_TOL:
        return -np.inf
    try:
        x_chol = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return -np.inf
    log_det_scale = 2.0 * np.sum(np.log(np.diag(scale_chol)))
    log_det_x = 2.0 * np.sum(np.log(np.diag(x_chol)))
    # tr(scale @ inv(x)) via triangular solves against the factor of x
    half = np.linalg.solve(x_chol, scale)
    trace = np.trace(np.linalg.solve(x_chol, half.T))
    return (
        0.5 * dof * log_det_scale
        - 0.5 * dof * d * math.log(2.0)
        - multigammaln(0.5 * dof, d)
        - 0.5 * (dof + d + 1) * log_det_x
        - 0.5 * trace
    )


def logpdf_inverse_gamma(x, shape, scale):
    """Log-density of IG(shape, scale) at ``x``; ``-inf`` outside support."""
    if shape <= 0 or scale <= 0:
        raise ValueError(f"inverse-gamma needs positive parameters, got ({shape}, {scale})")
    if x <= 0:
        return -np.inf
    return shape * math.log(scale) - gammaln(shape) - (shape + 1.0) * math.log(x) - scale / x


def logpdf_gamma(x, shape, scale):
    """Log-density of Gamma(shape, scale) at ``x``; ``-inf`` outside support."""
    if shape <= 0 or scale <= 0:
        raise ValueError(f"gamma needs positive parameters, got ({shape}, {scale})")
    if x <= 0:
        return -np.inf
    return -shape * math.log(scale) - gammaln(shape) + (shape - 1.0) * math.log(x) - x / scale


def logpdf_dirichlet(x, concentrations):
    """Log-density of Dirichlet(concentrations) at the simplex point ``x``."""
    x = np.asarray(x, dtype=float)
    conc = np.asarray(concentrations, dtype=float)
    if np.any(conc <= 0):
        raise ValueError(f"Dirichlet needs positive concentrations, got {conc}")
    if x.shape != conc.shape:
        raise ValueError("point and concentration lengths differ")
    if np.any(x <= 0) or abs(x.sum() - 1.0) > 1e-9:
        return -np.inf
    return gammaln(conc.sum()) - np.sum(gammaln(conc)) + np.sum((conc - 1.0) * np.log(x))
