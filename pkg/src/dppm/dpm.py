"""Restaurant-process Gibbs sampler for the infinite parsimonious mixture.

One sweep visits every observation, removes it from its cluster (deleting the
cluster if it empties), and reseats it among the existing clusters or a fresh
one proposed from the prior -- one auxiliary prior draw per observation.
Parameter blocks are then refreshed by their full conditionals and the
concentration parameter by the auxiliary beta/two-gamma scheme.

The per-observation loop runs through the compiled kernel in
:mod:`dppm._sweep`; everything random is pre-drawn per sweep so chains are
reproducible bit-for-bit from the seed regardless of the kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import models, rand
from ._sweep import label_sweep
from .models import ComponentParams, ModelFamily

__all__ = [
    "GibbsState",
    "ChainSample",
    "ChainResult",
    "crp_predictive",
    "log_crp_partition",
    "resample_label",
    "alpha_mixture_weight",
    "sample_alpha",
    "run_gibbs",
    "posterior_mode_K",
    "log_component_densities",
    "assignment_loglik",
]


@dataclass
class GibbsState:
    """Current labels, per-cluster parameters and concentration of a chain."""

    z: np.ndarray
    components: list
    alpha: float

    @property
    def n_clusters(self):
        return len(self.components)


@dataclass
class ChainSample:
    """One stored post-burn-in draw."""

    z: np.ndarray
    components: list
    alpha: float
    n_clusters: int
    joint_score: float
    weights: np.ndarray | None = None  # mixing proportions (finite sampler only)


@dataclass
class ChainResult:
    """Stored samples plus the chain-level summaries.

    ``per_sample_loglik[i]`` is the joint log score of stored sample ``i``
    (data log-density under the assignment plus the partition log prior);
    ``map_partition`` is the stored partition maximizing it among samples
    with ``n_clusters == k_mode``.  ``log_marginal`` is filled in by the
    model-selection layer.
    """

    samples: list
    k_mode: int
    map_partition: np.ndarray
    per_sample_loglik: np.ndarray
    log_marginal: float | None = None

    @property
    def k_trace(self):
        return np.array([s.n_clusters for s in self.samples])

    def k_mode_mass(self):
        """Fraction of stored samples whose cluster count equals the mode."""
        trace = self.k_trace
        return float(np.mean(trace == self.k_mode))


def crp_predictive(counts, alpha, total):
    """Seating probabilities over K existing clusters plus a new one.

    Entry ``k < K`` is ``counts[k] / (alpha + total)``; the last entry is
    ``alpha / (alpha + total)``.  ``total`` must equal ``sum(counts)``.
    """
    counts = np.asarray(counts, dtype=float)
    if np.any(counts < 0):
        raise ValueError("negative cluster counts")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if counts.sum() != total:
        raise ValueError(f"counts sum to {counts.sum()}, expected {total}")
    denom = alpha + total
    return np.append(counts / denom, alpha / denom)


def log_crp_partition(counts, alpha):
    """Log probability of a partition with the given cluster sizes.

    Product of the sequential seating probabilities in any visiting order
    (the process is exchangeable).
    """
    counts = np.asarray(counts, dtype=float)
    counts = counts[counts > 0]
    n = counts.sum()
    k = counts.size
    return float(
        gammaln(alpha) - gammaln(alpha + n) + k * math.log(alpha)
        + np.sum(gammaln(counts))
    )


def alpha_mixture_weight(a, b, n_clusters, n, eta):
    """Mixture weight on the higher-shape gamma in the concentration update."""
    return (a + n_clusters - 1.0) / (a + n_clusters - 1.0 + n * (b - math.log(eta)))


def sample_alpha(alpha, n_clusters, n, a, b, rng):
    """Concentration update via the auxiliary-beta two-gamma mixture.

    Draw ``eta ~ Beta(alpha+1, n)``, then return a draw from the mixture
    ``w * Gamma(a+K, rate=b-log eta) + (1-w) * Gamma(a+K-1, rate=b-log eta)``
    with ``w`` from :func:`alpha_mixture_weight`.
    """
    eta = rand.sample_beta(alpha + 1.0, n, rng)
    rate = b - math.log(eta)
    weight = alpha_mixture_weight(a, b, n_clusters, n, eta)
    shape = a + n_clusters if rng.random() < weight else a + n_clusters - 1.0
    return rand.sample_gamma(shape, 1.0 / rate, rng)


# ---------------------------------------------------------------------------
# densities under the current components
# ---------------------------------------------------------------------------

def log_component_densities(x, model, components):
    """(n, K) matrix of Gaussian log-densities under each component."""
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    out = np.empty((n, len(components)))
    for k in range(len(components)):
        cov = models.covariance_of(model, components, k)
        chol = rand.cholesky_spd(cov, name=f"covariance of cluster {k}")
        diff = x - components[k].mean
        ys = np.linalg.solve(chol, diff.T)
        log_det = 2.0 * np.sum(np.log(np.diag(chol)))
        out[:, k] = -0.5 * (d * rand.LOG_2PI + log_det + np.sum(ys * ys, axis=0))
    return out


def assignment_loglik(x, z, model, components):
    """Sum of log f(x_i | component z_i) over all observations."""
    dens = log_component_densities(x, model, components)
    return float(dens[np.arange(len(z)), z].sum())


# ---------------------------------------------------------------------------
# single-observation update (reference implementation of the kernel step)
# ---------------------------------------------------------------------------

def resample_label(i, state, x, model, hyper, rng):
    """Reseat observation ``i`` and return the updated state.

    Follows the same three steps as the batched kernel: drop the observation
    (deleting its cluster if now empty), score existing clusters by count
    times density alongside one fresh prior draw scored by ``alpha``, then
    reseat categorically.
    """
    x = np.asarray(x, dtype=float)
    z = state.z.copy()
    components = models.copy_components(state.components)
    shared = components[0].shared
    old = z[i]
    occupancy = np.bincount(z, minlength=len(components))
    if occupancy[old] == 1:
        del components[old]
        z[z > old] -= 1
        if components and model is ModelFamily.GENERAL_SCALE_FREE:
            models.normalize_scale_free(components)
    z[i] = -1
    counts = np.bincount(z[z >= 0], minlength=len(components))

    fresh = models.sample_prior(model, hyper, rng, shared=shared,
                                component_index=len(components))
    candidates = components + [fresh]
    logw = np.empty(len(candidates))
    for k, comp in enumerate(candidates):
        cov = models.covariance_of(model, candidates, k)
        prior = math.log(counts[k]) if k < len(components) else math.log(state.alpha)
        logw[k] = prior + rand.logpdf_mvn(x[i], comp.mean, cov)
    pick = rand.sample_categorical(logw, rng)
    if pick == len(components):
        components.append(fresh)
    z[i] = pick
    return GibbsState(z=z, components=components, alpha=state.alpha)


# ---------------------------------------------------------------------------
# auxiliary prior draws, batched per sweep
# ---------------------------------------------------------------------------

def _batch_inverse_wishart(dof, scale, size, rng):
    """(size, d, d) draws from IW(dof, scale) via a batched Bartlett construction."""
    d = scale.shape[0]
    scale_chol = rand.cholesky_spd(scale, name="inverse-Wishart scale")
    inv_scale = np.linalg.inv(scale_chol.T) @ np.linalg.inv(scale_chol)
    factor = np.linalg.cholesky(inv_scale)
    bart = np.zeros((size, d, d))
    dfs = dof - np.arange(d)
    diags = np.sqrt(rng.chisquare(dfs, size=(size, d)))
    idx = np.arange(d)
    bart[:, idx, idx] = diags
    tril = np.tril_indices(d, -1)
    if tril[0].size:
        bart[:, tril[0], tril[1]] = rng.standard_normal((size, tril[0].size))
    half = factor @ bart
    wishart = half @ np.transpose(half, (0, 2, 1))
    draws = np.linalg.inv(wishart)
    return 0.5 * (draws + np.transpose(draws, (0, 2, 1)))


def _batch_orientations(mats):
    """Deterministic eigenvector orientation of each SPD matrix in a batch.

    Matches :func:`dppm.models.orientation_from_spd` (eigenvalues descending,
    first above-threshold entry of each eigenvector positive).
    """
    _, eigvecs = np.linalg.eigh(mats)
    eigvecs = eigvecs[:, :, ::-1]
    lead = np.argmax(np.abs(eigvecs) > 1e-12, axis=1)
    lead_vals = np.take_along_axis(eigvecs, lead[:, None, :], axis=1)[:, 0, :]
    signs = np.where(lead_vals < 0, -1.0, 1.0)
    return np.ascontiguousarray(eigvecs * signs[:, None, :])


def _batch_inverse_gamma(shape, scale, size, rng):
    return 1.0 / rng.gamma(shape, 1.0 / scale, size=size)


def _draw_aux_batch(model, hyper, shared, n, rng):
    """Fresh prior pieces for ``n`` auxiliary components, given shared blocks.

    Returns ``(means, covs, extra)`` where ``extra`` holds the structured
    per-draw pieces needed to rebuild a ComponentParams when a draw is
    adopted as a new cluster.
    """
    d = hyper.dim
    half_nu = hyper.nu0 / 2.0
    half_s0 = hyper.s0_sq / 2.0
    extra = {}
    if model is ModelFamily.SPHERICAL_EQUAL:
        covs = np.broadcast_to(shared.lam * np.eye(d), (n, d, d)).copy()
    elif model is ModelFamily.SPHERICAL_FREE:
        lam = _batch_inverse_gamma(half_nu, half_s0, n, rng)
        covs = lam[:, None, None] * np.eye(d)
        extra["lam"] = lam
    elif model is ModelFamily.DIAGONAL_EQUAL:
        covs = np.broadcast_to(np.diag(shared.shape), (n, d, d)).copy()
    elif model is ModelFamily.DIAGONAL_FREE:
        lam = _batch_inverse_gamma(half_nu, half_s0, n, rng)
        covs = lam[:, None, None] * np.diag(shared.shape)
        extra["lam"] = lam
    elif model is ModelFamily.GENERAL_EQUAL:
        covs = np.broadcast_to(shared.sigma, (n, d, d)).copy()
    elif model is ModelFamily.GENERAL_SCALE_FREE:
        lam = _batch_inverse_gamma(half_nu, half_s0, n, rng)
        covs = lam[:, None, None] * shared.sigma
        extra["lam"] = lam
    elif model is ModelFamily.GENERAL_ORIENT_FREE:
        src = _batch_inverse_wishart(hyper.nu0, hyper.lambda0, n, rng)
        orient = _batch_orientations(src)
        covs = (orient * shared.shape) @ np.transpose(orient, (0, 2, 1))
        extra["orient"] = orient
        extra["orient_src"] = src
    elif model is ModelFamily.GENERAL_ORIENT_SCALE_FREE:
        src = _batch_inverse_wishart(hyper.nu0, hyper.lambda0, n, rng)
        orient = _batch_orientations(src)
        lam = _batch_inverse_gamma(half_nu, half_s0, n, rng)
        covs = lam[:, None, None] * (orient * shared.shape) @ np.transpose(orient, (0, 2, 1))
        extra["orient"] = orient
        extra["orient_src"] = src
        extra["lam"] = lam
    elif model is ModelFamily.GENERAL_FULL:
        covs = _batch_inverse_wishart(hyper.nu0, hyper.lambda0, n, rng)
        extra["sigma"] = covs
    else:
        raise ValueError(f"unhandled model {model}")
    chols = np.linalg.cholesky(covs)
    noise = rng.standard_normal((n, d))
    means = hyper.mu0 + np.einsum("nij,nj->ni", chols, noise) / math.sqrt(hyper.kappa)
    return means, covs, chols, extra


def _component_from_aux(i, means, extra, shared):
    comp = ComponentParams(mean=means[i].copy(), shared=shared)
    if "lam" in extra:
        comp.lam = float(extra["lam"][i])
    if "orient" in extra:
        comp.orient = extra["orient"][i].copy()
        comp.orient_src = extra["orient_src"][i].copy()
    if "sigma" in extra:
        comp.sigma = extra["sigma"][i].copy()
    return comp


def _inv_chol_terms(covs):
    """Inverse lower Cholesky factors and their log-diag sums, batched."""
    chols = np.linalg.cholesky(covs)
    linvs = np.linalg.inv(chols)
    lds = np.sum(np.log(np.diagonal(linvs, axis1=-2, axis2=-1)), axis=-1)
    return np.ascontiguousarray(linvs), np.ascontiguousarray(lds)


# ---------------------------------------------------------------------------
# the chain driver
# ---------------------------------------------------------------------------

def run_gibbs(x, model, hyper, n_samples=2000, burn_in=100, rng=None, seed=None,
              fixed_alpha=None, zero_likelihood=False):
    """Run one chain and return its :class:`ChainResult`.

    Starts from a single cluster holding everything, with a prior-drawn
    component and (unless ``fixed_alpha`` is given) a concentration drawn
    from its Gamma(shape=alpha_a, rate=alpha_b) hyperprior.  Records the
    post-burn-in states.

    ``zero_likelihood=True`` replaces the data density with a constant, so
    the chain targets the bare partition process -- used to validate the
    seating dynamics against closed-form expectations.
    """
    if rng is None:
        rng = rand.make_rng(seed)
    x = np.ascontiguousarray(np.asarray(x, dtype=float))
    n, d = x.shape
    if n_samples <= burn_in or burn_in < 0:
        raise ValueError(f"need n_samples > burn_in >= 0, got ({n_samples}, {burn_in})")

    alpha = fixed_alpha if fixed_alpha is not None else rand.sample_gamma(
        hyper.alpha_a, 1.0 / hyper.alpha_b, rng
    )
    components = [models.sample_prior(model, hyper, rng)]
    z = np.zeros(n, dtype=np.int64)

    cap = n + 1
    counts = np.zeros(cap, dtype=np.int64)
    means = np.zeros((cap, d))
    linvs = np.zeros((cap, d, d))
    lds = np.zeros(cap)
    origin = np.zeros(cap, dtype=np.int64)
    logw = np.zeros(cap + 1)
    counts[0] = n

    samples = []
    scores = []
    for step in range(n_samples):
        k = len(components)
        if not zero_likelihood:
            covs = models.all_covariances(model, components)
            linvs[:k], lds[:k] = _inv_chol_terms(covs)
            for j, comp in enumerate(components):
                means[j] = comp.mean
            aux_means, _, aux_chols, aux_extra = _draw_aux_batch(
                model, hyper, components[0].shared, n, rng
            )
            aux_linvs = np.ascontiguousarray(np.linalg.inv(aux_chols))
            aux_lds = np.ascontiguousarray(
                np.sum(np.log(np.diagonal(aux_linvs, axis1=-2, axis2=-1)), axis=-1)
            )
        else:
            linvs[:k] = 0.0
            lds[:k] = 0.0
            aux_means = np.zeros((n, d))
            aux_linvs = np.zeros((n, d, d))
            aux_lds = np.zeros(n)
            aux_extra = {}
        origin[:k] = -np.arange(1, k + 1)
        unif = rng.random(n)

        k_new = label_sweep(x, z, counts, means, linvs, lds, origin, k,
                            alpha, aux_means, aux_linvs, aux_lds, unif, logw)

        shared = components[0].shared
        rebuilt = []
        for j in range(k_new):
            if origin[j] < 0:
                rebuilt.append(components[-origin[j] - 1])
            else:
                rebuilt.append(_component_from_aux(int(origin[j]), aux_means,
                                                   aux_extra, shared))
        components = rebuilt
        if model is ModelFamily.GENERAL_SCALE_FREE:
            models.normalize_scale_free(components)

        if not zero_likelihood:
            components = models.sample_posterior(model, x, z, hyper, components, rng)
        if fixed_alpha is None:
            alpha = sample_alpha(alpha, len(components), n, hyper.alpha_a,
                                 hyper.alpha_b, rng)

        if step >= burn_in:
            occupancy = np.bincount(z, minlength=len(components))
            score = log_crp_partition(occupancy, alpha)
            if not zero_likelihood:
                score += assignment_loglik(x, z, model, components)
            samples.append(ChainSample(
                z=z.copy(),
                components=models.copy_components(components),
                alpha=float(alpha),
                n_clusters=len(components),
                joint_score=float(score),
            ))
            scores.append(score)

    return _summarize(samples, np.array(scores))


def _summarize(samples, scores):
    k_trace = np.array([s.n_clusters for s in samples])
    k_mode = posterior_mode_from_trace(k_trace)
    at_mode = np.flatnonzero(k_trace == k_mode)
    best = at_mode[np.argmax(scores[at_mode])]
    return ChainResult(
        samples=samples,
        k_mode=int(k_mode),
        map_partition=samples[best].z.copy(),
        per_sample_loglik=scores,
    )


def posterior_mode_from_trace(k_trace):
    """Most frequent cluster count; ties resolve to the smaller count."""
    k_trace = np.asarray(k_trace)
    if k_trace.size == 0:
        raise ValueError("empty chain")
    values, freq = np.unique(k_trace, return_counts=True)
    return int(values[np.argmax(freq)])  # np.unique sorts, argmax takes first max


def posterior_mode_K(chain):
    """Posterior-mode cluster count of a chain."""
    return posterior_mode_from_trace(chain.k_trace)
