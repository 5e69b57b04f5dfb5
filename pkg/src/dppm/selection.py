"""Marginal likelihoods, Bayes factors and evidence-scale model ranking.

The marginal likelihood of a fitted chain is approximated by
``(2*pi)**(nu/2) * |H|**(1/2) * p(X|theta_hat) * p(theta_hat)`` where
``theta_hat`` is the highest-scoring stored sample, ``nu`` the model's free
parameter count, and ``H`` the sample covariance of the flattened posterior
draws restricted to the modal cluster count.  Pairs of models are then
compared on the ``2 log BF`` evidence scale.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import models, rand
from .dpm import log_component_densities
from .models import ModelFamily

__all__ = [
    "Evidence",
    "BayesFactorReport",
    "MarginalLikelihoodEstimate",
    "classify_evidence",
    "bayes_factor",
    "vectorize_parameters",
    "mixture_loglik",
    "laplace_marginal_loglik",
    "select_model",
]


class Evidence(enum.Enum):
    """Qualitative strength of the evidence for the first model of a pair."""

    NEGATIVE = "Negative"
    NOT_BAD = "NotBad"
    SUBSTANTIAL = "Substantial"
    STRONG = "Strong"
    DECISIVE = "Decisive"


def classify_evidence(two_log_bf):
    """Evidence category for a ``2 log BF`` value.

    Bands: negative below 0, NotBad on [0, 2], Substantial on (2, 5),
    Strong on [5, 10], Decisive above 10.  The bands abut, so the edges are
    pinned deterministically: 0 and 2 read as NotBad, 5 and 10 as Strong.
    """
    v = float(two_log_bf)
    if v < 0:
        return Evidence.NEGATIVE
    if v <= 2:
        return Evidence.NOT_BAD
    if v < 5:
        return Evidence.SUBSTANTIAL
    if v <= 10:
        return Evidence.STRONG
    return Evidence.DECISIVE


@dataclass(frozen=True)
class BayesFactorReport:
    """Bayes factor of model 1 against model 2 with its evidence category."""

    bf: float
    two_log_bf: float
    evidence: Evidence


def bayes_factor(log_ml_1, log_ml_2):
    """Compare two models through their log marginal likelihoods."""
    if not (np.isfinite(log_ml_1) and np.isfinite(log_ml_2)):
        raise ValueError("log marginal likelihoods must be finite")
    diff = float(log_ml_1) - float(log_ml_2)
    return BayesFactorReport(
        bf=math.exp(diff) if diff < 700 else math.inf,
        two_log_bf=2.0 * diff,
        evidence=classify_evidence(2.0 * diff),
    )


@dataclass(frozen=True)
class MarginalLikelihoodEstimate:
    """Laplace-Metropolis estimate and its ingredients."""

    log_ml: float
    nu_m: int
    log_det_h: float
    theta_hat: np.ndarray


# ---------------------------------------------------------------------------
# flattening posterior draws into parameter vectors
# ---------------------------------------------------------------------------

def _tril(mat):
    return mat[np.tril_indices(mat.shape[0])]


def _strict_tril(mat):
    return mat[np.tril_indices(mat.shape[0], -1)]


def vectorize_parameters(model, sample):
    """Deterministic flattening of one stored sample.

    Layout: logs of the occupancy-proportion ratios against the last cluster
    (K-1 entries, none when K=1), then all means, then the model's covariance
    free parameters (log volumes, log diagonal shape entries, lower-triangular
    Cholesky entries of full covariances, strict lower triangles of
    orientation matrices).  Volume blocks of the per-volume models are
    anchored so the first cluster's volume is 1 before flattening.
    """
    comps = sample.components
    k = sample.n_clusters
    if len(comps) != k:
        raise ValueError(f"sample has {len(comps)} components, expected {k}")
    counts = np.bincount(sample.z, minlength=k).astype(float)
    if np.any(counts == 0):
        raise ValueError("cannot vectorize a sample with an empty cluster")
    parts = []
    if k > 1:
        props = counts / counts.sum()
        parts.append(np.log(props[:-1] / props[-1]))
    parts.extend(comp.mean for comp in comps)

    shared = comps[0].shared
    if model is ModelFamily.SPHERICAL_EQUAL:
        parts.append([math.log(shared.lam)])
    elif model is ModelFamily.SPHERICAL_FREE:
        parts.append(np.log([comp.lam for comp in comps]))
    elif model is ModelFamily.DIAGONAL_EQUAL:
        parts.append(np.log(shared.shape))
    elif model is ModelFamily.DIAGONAL_FREE:
        anchor = comps[0].lam
        parts.append(np.log(shared.shape * anchor))
        if k > 1:
            parts.append(np.log([comp.lam / anchor for comp in comps[1:]]))
    elif model is ModelFamily.GENERAL_EQUAL:
        parts.append(_tril(rand.cholesky_spd(shared.sigma, name="shared covariance")))
    elif model is ModelFamily.GENERAL_SCALE_FREE:
        if k > 1:
            parts.append(np.log([comp.lam for comp in comps[1:]]))
        parts.append(_tril(rand.cholesky_spd(shared.sigma, name="shared covariance")))
    elif model is ModelFamily.GENERAL_ORIENT_FREE:
        parts.append(np.log(shared.shape))
        parts.extend(_strict_tril(comp.orient) for comp in comps)
    elif model is ModelFamily.GENERAL_ORIENT_SCALE_FREE:
        anchor = comps[0].lam
        parts.append(np.log(shared.shape * anchor))
        if k > 1:
            parts.append(np.log([comp.lam / anchor for comp in comps[1:]]))
        parts.extend(_strict_tril(comp.orient) for comp in comps)
    elif model is ModelFamily.GENERAL_FULL:
        parts.extend(
            _tril(rand.cholesky_spd(comp.sigma, name=f"covariance of cluster {j}"))
            for j, comp in enumerate(comps)
        )
    else:
        raise ValueError(f"unhandled model {model}")
    return np.concatenate([np.atleast_1d(np.asarray(p, dtype=float)) for p in parts])


def mixture_loglik(x, model, components, weights):
    """Log-likelihood of the data under the finite mixture density."""
    dens = log_component_densities(x, model, components)
    logw = np.log(np.asarray(weights, dtype=float))
    stacked = logw + dens
    top = stacked.max(axis=1, keepdims=True)
    return float(np.sum(top[:, 0] + np.log(np.sum(np.exp(stacked - top), axis=1))))


# ---------------------------------------------------------------------------
# label alignment across samples
# ---------------------------------------------------------------------------

def _greedy_match(ref_means, means):
    """Permutation aligning ``means`` to ``ref_means`` by greedy nearest pairs.

    ``perm[r]`` is the index in ``means`` playing the role of reference
    cluster ``r``.
    """
    k = len(ref_means)
    dist = np.sum((ref_means[:, None, :] - means[None, :, :]) ** 2, axis=-1)
    perm = np.full(k, -1)
    dist = dist.copy()
    for _ in range(k):
        r, c = np.unravel_index(np.argmin(dist), dist.shape)
        perm[r] = c
        dist[r, :] = np.inf
        dist[:, c] = np.inf
    return perm


def _aligned_copy(sample, perm):
    """Relabel a sample so cluster ``perm[r]`` becomes cluster ``r``."""
    inverse = np.empty_like(perm)
    inverse[perm] = np.arange(len(perm))
    shared = sample.components[0].shared
    comps = [sample.components[j] for j in perm]
    from .dpm import ChainSample  # local import avoids a cycle at module load

    return ChainSample(
        z=inverse[sample.z],
        components=comps,
        alpha=sample.alpha,
        n_clusters=sample.n_clusters,
        joint_score=sample.joint_score,
        weights=None if sample.weights is None else sample.weights[perm],
    )


# ---------------------------------------------------------------------------
# the Laplace-Metropolis estimate
# ---------------------------------------------------------------------------

def laplace_marginal_loglik(chain, model, hyper, x):
    """Marginal log-likelihood of a fitted chain for ``model``.

    Restricts the chain to samples at the modal cluster count, scores each by
    mixture log-likelihood (occupancy-fraction proportions) plus prior
    log-density, takes the top scorer as the posterior-mode point, and
    estimates the posterior covariance from the flattened samples after
    aligning labels to the mode.
    """
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    k_mode = chain.k_mode
    usable = [
        s for s in chain.samples
        if s.n_clusters == k_mode and np.all(np.bincount(s.z, minlength=k_mode) > 0)
    ]
    if not usable:
        raise ValueError("no stored samples at the modal cluster count have all "
                         "clusters occupied; run a longer chain")

    scores = np.empty(len(usable))
    for i, s in enumerate(usable):
        occ = np.bincount(s.z, minlength=k_mode) / n
        scores[i] = (mixture_loglik(x, model, s.components, occ)
                     + models.log_prior_density(model, s.components, hyper))
    best = int(np.argmax(scores))
    ref = usable[best]
    ref_means = np.array([c.mean for c in ref.components])

    vecs = []
    for s in usable:
        if s is ref or k_mode == 1:
            aligned = s
        else:
            perm = _greedy_match(ref_means, np.array([c.mean for c in s.components]))
            aligned = _aligned_copy(s, perm)
        vecs.append(vectorize_parameters(model, aligned))
    vecs = np.array(vecs)

    nu_len = vecs.shape[1]
    nu_m = models.free_parameter_count(model, k_mode, d)
    if len(usable) < nu_len + 1:
        raise ValueError(
            f"only {len(usable)} samples at the modal cluster count but the "
            f"posterior covariance needs at least {nu_len + 1}; run longer chains"
        )
    cov = np.atleast_2d(np.cov(vecs, rowvar=False, ddof=1))
    cov[np.diag_indices_from(cov)] += 1e-10 * float(np.mean(np.diag(cov)))
    sign, log_det = np.linalg.slogdet(cov)
    if sign <= 0:
        raise ValueError("posterior covariance of the flattened samples is not "
                         "positive definite; run longer chains")
    log_ml = 0.5 * nu_m * rand.LOG_2PI + 0.5 * log_det + float(scores[best])
    return MarginalLikelihoodEstimate(
        log_ml=float(log_ml),
        nu_m=int(nu_m),
        log_det_h=float(log_det),
        theta_hat=vecs[best],
    )


def select_model(results, dim):
    """Rank fitted models by log marginal likelihood.

    ``results`` holds ``(model, k_hat, log_ml)`` triples.  Ties break toward
    the smaller free-parameter count at the fitted ``(k_hat, dim)``.  Returns
    ``(best, ranked, report)`` where ``report`` compares the winner against
    the runner-up (None for a single entry).
    """
    if not results:
        raise ValueError("no fitted models to select from")
    ranked = sorted(
        results,
        key=lambda entry: (-entry[2], models.free_parameter_count(entry[0], entry[1], dim)),
    )
    best = ranked[0]
    report = None
    if len(ranked) > 1:
        report = bayes_factor(ranked[0][2], ranked[1][2])
    return best, ranked, report
