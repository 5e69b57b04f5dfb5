"""The nine parsimonious Gaussian covariance families and their conjugate updates.

Each cluster covariance decomposes as ``volume * orientation @ shape @
orientation.T`` with selected pieces shared across clusters, which yields the
nine variants below (three spherical/diagonal, six general).  For every
variant this module provides prior draws, one full-conditional Gibbs sweep
over the variant's parameter blocks, covariance assembly, exact prior
log-densities, and the free-parameter count used by the Laplace-Metropolis
marginal likelihood.

Cluster labels are 0-based throughout the Python API.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import rand

__all__ = [
    "ModelFamily",
    "Hyperparams",
    "SharedBlocks",
    "ComponentParams",
    "SufficientStats",
    "sufficient_stats",
    "sample_prior",
    "sample_posterior",
    "covariance_of",
    "all_covariances",
    "free_parameter_count",
    "log_prior_density",
    "decompose_covariance",
    "orientation_from_spd",
]


class ModelFamily(enum.Enum):
    """Covariance structure variants, identified by their CLI code strings.

    The code spells out which pieces of ``volume * D @ A @ D.T`` vary per
    cluster (``k`` subscript) and which are shared.
    """

    SPHERICAL_EQUAL = "lI"            # lam * I
    SPHERICAL_FREE = "lkI"            # lam_k * I
    DIAGONAL_EQUAL = "lA"             # lam * A           (volume folded into A)
    DIAGONAL_FREE = "lkA"             # lam_k * A
    GENERAL_EQUAL = "lDADt"           # lam * D A D^T     (one full covariance)
    GENERAL_SCALE_FREE = "lkDADt"     # lam_k * D A D^T
    GENERAL_ORIENT_FREE = "lDkADkt"   # lam * D_k A D_k^T (volume folded into A)
    GENERAL_ORIENT_SCALE_FREE = "lkDkADkt"  # lam_k * D_k A D_k^T
    GENERAL_FULL = "lkDkAkDkt"        # lam_k * D_k A_k D_k^T

    @classmethod
    def from_code(cls, code):
        for member in cls:
            if member.value == code:
                return member
        raise ValueError(
            f"unknown model code {code!r}; expected one of "
            f"{[m.value for m in cls]}"
        )

    @property
    def code(self):
        return self.value

    @property
    def family(self):
        """'spherical', 'diagonal' or 'general'."""
        if self in (ModelFamily.SPHERICAL_EQUAL, ModelFamily.SPHERICAL_FREE):
            return "spherical"
        if self in (ModelFamily.DIAGONAL_EQUAL, ModelFamily.DIAGONAL_FREE):
            return "diagonal"
        return "general"

    @property
    def free_volume(self):
        """True when the volume scalar varies per cluster."""
        return self in (
            ModelFamily.SPHERICAL_FREE,
            ModelFamily.DIAGONAL_FREE,
            ModelFamily.GENERAL_SCALE_FREE,
            ModelFamily.GENERAL_ORIENT_SCALE_FREE,
            ModelFamily.GENERAL_FULL,
        )

    @property
    def free_orientation(self):
        """True when the orientation matrix varies per cluster."""
        return self in (
            ModelFamily.GENERAL_ORIENT_FREE,
            ModelFamily.GENERAL_ORIENT_SCALE_FREE,
            ModelFamily.GENERAL_FULL,
        )


# Variants with a shared diagonal shape block (per-coordinate IG updates).
_DIAG_SHAPE_MODELS = (
    ModelFamily.DIAGONAL_EQUAL,
    ModelFamily.DIAGONAL_FREE,
    ModelFamily.GENERAL_ORIENT_FREE,
    ModelFamily.GENERAL_ORIENT_SCALE_FREE,
)


@dataclass(frozen=True)
class Hyperparams:
    """Prior hyperparameters shared by all model variants.

    ``mu0`` and ``lambda0`` anchor the mean and covariance priors; ``kappa``
    is the mean shrinkage, ``nu0`` the degrees of freedom, ``s0_sq`` the
    scalar scale used by the inverse-gamma blocks, and ``(alpha_a, alpha_b)``
    the Gamma(shape, rate) hyperprior on the concentration parameter.
    """

    mu0: np.ndarray
    kappa: float
    nu0: float
    lambda0: np.ndarray
    s0_sq: float
    alpha_a: float = 1.0
    alpha_b: float = 1.0

    def __post_init__(self):
        mu0 = np.atleast_1d(np.asarray(self.mu0, dtype=float))
        object.__setattr__(self, "mu0", mu0)
        lam0 = np.atleast_2d(np.asarray(self.lambda0, dtype=float))
        rand.ensure_spd(lam0, name="lambda0")
        object.__setattr__(self, "lambda0", lam0)
        d = mu0.size
        if lam0.shape != (d, d):
            raise ValueError(f"lambda0 shape {lam0.shape} does not match mu0 length {d}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.nu0 <= d - 1:
            raise ValueError(f"nu0 must exceed d-1 = {d - 1}, got {self.nu0}")
        if self.s0_sq <= 0:
            raise ValueError(f"s0_sq must be positive, got {self.s0_sq}")
        if self.alpha_a <= 0 or self.alpha_b <= 0:
            raise ValueError("alpha hyperprior parameters must be positive")

    @property
    def dim(self):
        return self.mu0.size

    @classmethod
    def from_data(cls, x, kappa=None, nu0=None, s0_scale=1.0, preset="main",
                  alpha_a=1.0, alpha_b=1.0):
        """Data-driven defaults: empirical mean/covariance anchors.

        ``preset='main'`` uses shrinkage 5, ``preset='appendix'`` uses 0.1;
        an explicit ``kappa`` overrides either.  ``s0_scale`` multiplies the
        default scalar scale (the largest eigenvalue of the data covariance).
        """
        x = np.asarray(x, dtype=float)
        if x.ndim != 2:
            raise ValueError("expected an (n, d) data matrix")
        n, d = x.shape
        if n < 2:
            raise ValueError("need at least two observations for data-driven priors")
        if preset not in ("main", "appendix"):
            raise ValueError(f"unknown preset {preset!r}")
        if kappa is None:
            kappa = 5.0 if preset == "main" else 0.1
        mu0 = x.mean(axis=0)
        lambda0 = np.atleast_2d(np.cov(x, rowvar=False, ddof=1))
        s0_sq = float(s0_scale) * float(np.linalg.eigvalsh(lambda0)[-1])
        if nu0 is None:
            nu0 = d + 2.0
        return cls(mu0=mu0, kappa=float(kappa), nu0=float(nu0),
                   lambda0=lambda0, s0_sq=s0_sq,
                   alpha_a=alpha_a, alpha_b=alpha_b)


@dataclass
class SharedBlocks:
    """Covariance pieces held once per mixture (referenced by every component)."""

    lam: float | None = None          # shared volume (lI)
    shape: np.ndarray | None = None   # shared diagonal shape entries
    sigma: np.ndarray | None = None   # shared full covariance (lDADt) or Sigma0 (lkDADt)

    def copy(self):
        return SharedBlocks(
            lam=self.lam,
            shape=None if self.shape is None else self.shape.copy(),
            sigma=None if self.sigma is None else self.sigma.copy(),
        )


@dataclass
class ComponentParams:
    """Parameters of one mixture component.

    ``shared`` points at the mixture-wide :class:`SharedBlocks` instance; the
    remaining fields are the per-cluster pieces the variant actually uses.
    ``orient_src`` keeps the SPD draw whose eigenvectors define ``orient`` so
    that the orientation block has an evaluable prior density.
    """

    mean: np.ndarray
    shared: SharedBlocks
    lam: float = 1.0
    orient: np.ndarray | None = None
    orient_src: np.ndarray | None = None
    sigma: np.ndarray | None = None

    def copy(self, shared):
        return ComponentParams(
            mean=self.mean.copy(),
            shared=shared,
            lam=self.lam,
            orient=None if self.orient is None else self.orient.copy(),
            orient_src=None if self.orient_src is None else self.orient_src.copy(),
            sigma=None if self.sigma is None else self.sigma.copy(),
        )


def copy_components(components):
    """Deep-copy a component list, preserving the single shared-blocks object."""
    if not components:
        return []
    shared = components[0].shared.copy()
    return [comp.copy(shared) for comp in components]


@dataclass(frozen=True)
class SufficientStats:
    """Per-cluster count, empirical mean and scatter matrix."""

    n: int
    xbar: np.ndarray
    scatter: np.ndarray


def sufficient_stats(x, z, k):
    """Count, mean and scatter of the rows of ``x`` assigned to cluster ``k``.

    An empty cluster yields ``n=0`` with a zero mean vector and zero scatter.
    """
    x = np.asarray(x, dtype=float)
    members = x[np.asarray(z) == k]
    d = x.shape[1]
    if members.shape[0] == 0:
        return SufficientStats(0, np.zeros(d), np.zeros((d, d)))
    xbar = members.mean(axis=0)
    centered = members - xbar
    return SufficientStats(members.shape[0], xbar, centered.T @ centered)


def _sweep_stats(x, z, n_clusters, hyper):
    """Stats plus the shrinkage outer products used by every conjugate update.

    Returns ``(stats, data_mats, mu_ns)`` where ``data_mats[k] = W_k +
    (n_k kappa/(n_k+kappa)) (xbar-mu0)(xbar-mu0)^T`` and ``mu_ns[k]`` is the
    posterior mean location.
    """
    stats = [sufficient_stats(x, z, k) for k in range(n_clusters)]
    data_mats = []
    mu_ns = []
    for st in stats:
        if st.n == 0:
            data_mats.append(np.zeros_like(hyper.lambda0))
            mu_ns.append(hyper.mu0.copy())
            continue
        diff = st.xbar - hyper.mu0
        shrink = st.n * hyper.kappa / (st.n + hyper.kappa)
        data_mats.append(st.scatter + shrink * np.outer(diff, diff))
        mu_ns.append((st.n * st.xbar + hyper.kappa * hyper.mu0) / (st.n + hyper.kappa))
    return stats, data_mats, mu_ns


def orientation_from_spd(mat):
    """Orthonormal eigenvector matrix of an SPD matrix, eigenvalues descending.

    Sign convention: the first entry of each eigenvector whose magnitude
    exceeds 1e-12 is made positive, so the output is a deterministic function
    of the input.
    """
    eigvals, eigvecs = np.linalg.eigh(mat)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    for j in range(eigvecs.shape[1]):
        col = eigvecs[:, j]
        lead = np.argmax(np.abs(col) > 1e-12)
        if col[lead] < 0:
            eigvecs[:, j] = -col
    return eigvecs, eigvals


def decompose_covariance(sigma):
    """Split an SPD matrix into (volume, unit-determinant shape, orientation).

    Volume is ``det(sigma)**(1/d)``; the shape entries are the eigenvalues
    divided by the volume, in decreasing order.
    """
    sigma = np.asarray(sigma, dtype=float)
    d = sigma.shape[0]
    orient, eigvals = orientation_from_spd(sigma)
    log_lam = np.sum(np.log(eigvals)) / d
    lam = float(np.exp(log_lam))
    return lam, eigvals / lam, orient


def covariance_of(model, components, k):
    """Assemble the covariance matrix of cluster ``k`` from its decomposition."""
    comp = components[k]
    shared = comp.shared
    d = comp.mean.size
    if model is ModelFamily.SPHERICAL_EQUAL:
        return shared.lam * np.eye(d)
    if model is ModelFamily.SPHERICAL_FREE:
        return comp.lam * np.eye(d)
    if model is ModelFamily.DIAGONAL_EQUAL:
        return np.diag(shared.shape)
    if model is ModelFamily.DIAGONAL_FREE:
        return comp.lam * np.diag(shared.shape)
    if model is ModelFamily.GENERAL_EQUAL:
        return shared.sigma.copy()
    if model is ModelFamily.GENERAL_SCALE_FREE:
        return comp.lam * shared.sigma
    if model is ModelFamily.GENERAL_ORIENT_FREE:
        return (comp.orient * shared.shape) @ comp.orient.T
    if model is ModelFamily.GENERAL_ORIENT_SCALE_FREE:
        return comp.lam * (comp.orient * shared.shape) @ comp.orient.T
    if model is ModelFamily.GENERAL_FULL:
        return comp.sigma.copy()
    raise ValueError(f"unhandled model {model}")


def all_covariances(model, components):
    """Stacked (K, d, d) covariances for the current component list."""
    return np.array([covariance_of(model, components, k) for k in range(len(components))])


def free_parameter_count(model, n_clusters, dim):
    """Number of free mixture parameters for ``n_clusters`` components in ``dim``."""
    if n_clusters < 1 or dim < 1:
        raise ValueError("n_clusters and dim must be positive")
    k, d = n_clusters, dim
    ups = (k - 1) + k * d
    om = d * (d + 1) // 2
    return {
        ModelFamily.SPHERICAL_EQUAL: ups + 1,
        ModelFamily.SPHERICAL_FREE: ups + d,
        ModelFamily.DIAGONAL_EQUAL: ups + d,
        ModelFamily.DIAGONAL_FREE: ups + d + k - 1,
        ModelFamily.GENERAL_EQUAL: ups + om,
        ModelFamily.GENERAL_SCALE_FREE: ups + om + k - 1,
        ModelFamily.GENERAL_ORIENT_FREE: ups + k * om - (k - 1) * d,
        ModelFamily.GENERAL_ORIENT_SCALE_FREE: ups + k * om - (k - 1) * (d - 1),
        ModelFamily.GENERAL_FULL: ups + k * om,
    }[model]


# ---------------------------------------------------------------------------
# prior draws
# ---------------------------------------------------------------------------

def _draw_shared(model, hyper, rng):
    """Draw the shared covariance blocks of ``model`` from their priors."""
    d = hyper.dim
    shared = SharedBlocks()
    if model is ModelFamily.SPHERICAL_EQUAL:
        shared.lam = rand.sample_inverse_gamma(hyper.nu0 / 2.0, hyper.s0_sq / 2.0, rng)
    elif model in _DIAG_SHAPE_MODELS:
        shared.shape = np.array([
            rand.sample_inverse_gamma(hyper.nu0 / 2.0, hyper.s0_sq / 2.0, rng)
            for _ in range(d)
        ])
    elif model in (ModelFamily.GENERAL_EQUAL, ModelFamily.GENERAL_SCALE_FREE):
        shared.sigma = rand.sample_inverse_wishart(hyper.nu0, hyper.lambda0, rng)
    return shared


def sample_prior(model, hyper, rng, shared=None, component_index=0):
    """Draw one component from the prior of ``model``.

    Shared blocks are drawn only when ``shared`` is None (i.e. not yet drawn
    for this mixture); per-component pieces are always fresh.  Under the
    scale-free general model the first component's volume is pinned to 1 for
    identifiability, so ``component_index`` matters there.
    """
    if shared is None:
        shared = _draw_shared(model, hyper, rng)
    comp = ComponentParams(mean=np.empty(hyper.dim), shared=shared)
    half_nu = hyper.nu0 / 2.0
    half_s0 = hyper.s0_sq / 2.0
    if model is ModelFamily.SPHERICAL_FREE or model is ModelFamily.DIAGONAL_FREE:
        comp.lam = rand.sample_inverse_gamma(half_nu, half_s0, rng)
    elif model is ModelFamily.GENERAL_SCALE_FREE:
        comp.lam = 1.0 if component_index == 0 else rand.sample_inverse_gamma(half_nu, half_s0, rng)
    elif model.free_orientation and model is not ModelFamily.GENERAL_FULL:
        comp.orient_src = rand.sample_inverse_wishart(hyper.nu0, hyper.lambda0, rng)
        comp.orient, _ = orientation_from_spd(comp.orient_src)
        if model is ModelFamily.GENERAL_ORIENT_SCALE_FREE:
            comp.lam = rand.sample_inverse_gamma(half_nu, half_s0, rng)
    elif model is ModelFamily.GENERAL_FULL:
        comp.sigma = rand.sample_inverse_wishart(hyper.nu0, hyper.lambda0, rng)
    cov = covariance_of(model, [comp], 0)
    comp.mean = rand.sample_mvn(hyper.mu0, cov / hyper.kappa, rng)
    return comp


# ---------------------------------------------------------------------------
# full-conditional sweep
# ---------------------------------------------------------------------------

def sample_posterior(model, x, z, hyper, components, rng):
    """One Gibbs sweep over all parameter blocks of ``model``.

    Means are refreshed first (conditional on the current covariances), then
    per-cluster covariance pieces, then the blocks shared across clusters,
    in a fixed order so chains are reproducible.  Empty clusters fall back
    to their prior through the ``n_k = 0`` reduction of the updates.
    """
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    n_clusters = len(components)
    stats, data_mats, mu_ns = _sweep_stats(x, z, n_clusters, hyper)
    new = copy_components(components)
    shared = new[0].shared

    covs = all_covariances(model, new)
    for k, comp in enumerate(new):
        scale = covs[k] / (stats[k].n + hyper.kappa)
        comp.mean = rand.sample_mvn(mu_ns[k], scale, rng)

    if model is ModelFamily.SPHERICAL_EQUAL:
        _update_spherical_equal(new, stats, data_mats, hyper, n, rng)
    elif model is ModelFamily.SPHERICAL_FREE:
        _update_spherical_free(new, stats, data_mats, hyper, rng)
    elif model is ModelFamily.DIAGONAL_EQUAL:
        _update_diagonal_equal(new, data_mats, hyper, n, rng)
    elif model is ModelFamily.DIAGONAL_FREE:
        _update_diagonal_free(new, stats, data_mats, hyper, n, rng)
    elif model is ModelFamily.GENERAL_EQUAL:
        shared.sigma = rand.sample_inverse_wishart(
            hyper.nu0 + n, hyper.lambda0 + sum(data_mats), rng
        )
    elif model is ModelFamily.GENERAL_SCALE_FREE:
        _update_general_scale_free(new, stats, data_mats, hyper, n, rng)
    elif model is ModelFamily.GENERAL_ORIENT_FREE:
        _update_orient(new, stats, data_mats, hyper, rng)
        _update_diag_shape(new, data_mats, hyper,
                           shape_dof=n + hyper.nu0 + n_clusters * (d + 1) - 2,
                           use_lam=False, rng=rng)
    elif model is ModelFamily.GENERAL_ORIENT_SCALE_FREE:
        _update_orient(new, stats, data_mats, hyper, rng)
        _update_diag_shape(new, data_mats, hyper,
                           shape_dof=n + hyper.nu0 + n_clusters * d + 1,
                           use_lam=True, rng=rng)
        _update_orient_volumes(new, stats, data_mats, hyper, rng)
    elif model is ModelFamily.GENERAL_FULL:
        for k, comp in enumerate(new):
            comp.sigma = rand.sample_inverse_wishart(
                stats[k].n + hyper.nu0, hyper.lambda0 + data_mats[k], rng
            )
    else:
        raise ValueError(f"unhandled model {model}")
    return new


def _update_spherical_equal(comps, stats, data_mats, hyper, n, rng):
    total = hyper.s0_sq + sum(np.trace(m) for m in data_mats)
    comps[0].shared.lam = rand.sample_inverse_gamma(
        (hyper.nu0 + n) / 2.0, total / 2.0, rng
    )


def _update_spherical_free(comps, stats, data_mats, hyper, rng):
    for k, comp in enumerate(comps):
        comp.lam = rand.sample_inverse_gamma(
            (hyper.nu0 + comp.mean.size * stats[k].n) / 2.0,
            (hyper.s0_sq + np.trace(data_mats[k])) / 2.0,
            rng,
        )


def _update_diagonal_equal(comps, data_mats, hyper, n, rng):
    d = comps[0].mean.size
    n_clusters = len(comps)
    pooled = sum(m + hyper.lambda0 for m in data_mats)
    dof = n + hyper.nu0 + n_clusters * (d + 1) - 2
    diag = np.diag(pooled)
    comps[0].shared.shape = np.array([
        rand.sample_inverse_gamma(dof / 2.0, diag[j] / 2.0, rng) for j in range(d)
    ])


def _update_diagonal_free(comps, stats, data_mats, hyper, n, rng):
    d = comps[0].mean.size
    n_clusters = len(comps)
    pooled = sum((m + hyper.lambda0) / comp.lam for m, comp in zip(data_mats, comps))
    dof = n + hyper.nu0 + n_clusters * d + 1
    diag = np.diag(pooled)
    shape = np.array([
        rand.sample_inverse_gamma(dof / 2.0, diag[j] / 2.0, rng) for j in range(d)
    ])
    comps[0].shared.shape = shape
    inv_shape = 1.0 / shape
    for k, comp in enumerate(comps):
        trace = float(np.sum(inv_shape * np.diag(data_mats[k] + hyper.lambda0)))
        comp.lam = rand.sample_inverse_gamma(
            (hyper.nu0 + stats[k].n * d) / 2.0,
            (hyper.s0_sq + trace) / 2.0,
            rng,
        )


def _update_general_scale_free(comps, stats, data_mats, hyper, n, rng):
    shared = comps[0].shared
    d = comps[0].mean.size
    sigma0_inv = np.linalg.inv(shared.sigma)
    for k, comp in enumerate(comps):
        if k == 0:
            comp.lam = 1.0  # identifiability anchor
            continue
        trace = float(np.trace(sigma0_inv @ data_mats[k]))
        comp.lam = rand.sample_inverse_gamma(
            (hyper.nu0 + stats[k].n * d) / 2.0,
            (hyper.s0_sq + trace) / 2.0,
            rng,
        )
    pooled = hyper.lambda0 + sum(m / comp.lam for m, comp in zip(data_mats, comps))
    shared.sigma = rand.sample_inverse_wishart(hyper.nu0 + n, pooled, rng)


def _update_orient(comps, stats, data_mats, hyper, rng):
    for k, comp in enumerate(comps):
        comp.orient_src = rand.sample_inverse_wishart(
            stats[k].n + hyper.nu0, hyper.lambda0 + data_mats[k], rng
        )
        comp.orient, _ = orientation_from_spd(comp.orient_src)


def _update_diag_shape(comps, data_mats, hyper, shape_dof, use_lam, rng):
    d = comps[0].mean.size
    pooled = np.zeros(d)
    for comp, mat in zip(comps, data_mats):
        rotated = comp.orient.T @ (mat + hyper.lambda0) @ comp.orient
        pooled += np.diag(rotated) / (comp.lam if use_lam else 1.0)
    comps[0].shared.shape = np.array([
        rand.sample_inverse_gamma(shape_dof / 2.0, pooled[j] / 2.0, rng)
        for j in range(d)
    ])


def _update_orient_volumes(comps, stats, data_mats, hyper, rng):
    d = comps[0].mean.size
    inv_shape = 1.0 / comps[0].shared.shape
    for k, comp in enumerate(comps):
        rotated = comp.orient.T @ (data_mats[k] + hyper.lambda0) @ comp.orient
        trace = float(np.sum(inv_shape * np.diag(rotated)))
        comp.lam = rand.sample_inverse_gamma(
            (hyper.nu0 + stats[k].n * d) / 2.0,
            (hyper.s0_sq + trace) / 2.0,
            rng,
        )


def normalize_scale_free(components):
    """Restore the first-volume-equals-one convention of the scale-free model.

    Rescales ``(lam_k, Sigma0)`` jointly, which leaves every assembled
    covariance unchanged; needed after cluster deletions move a non-anchor
    component into the first slot.
    """
    anchor = components[0].lam
    if anchor == 1.0:
        return components
    components[0].shared.sigma = components[0].shared.sigma * anchor
    for comp in components:
        comp.lam = comp.lam / anchor
    components[0].lam = 1.0
    return components


# ---------------------------------------------------------------------------
# prior log-density
# ---------------------------------------------------------------------------

def log_prior_density(model, components, hyper):
    """Sum of the prior log-densities over all blocks of ``model``.

    Covers the means and every covariance block (with normalizing constants);
    per-cluster orientation blocks are scored through the SPD matrix that
    generated them.  Returns ``-inf`` for out-of-support parameter values.
    """
    half_nu = hyper.nu0 / 2.0
    half_s0 = hyper.s0_sq / 2.0
    total = 0.0
    if components:
        shared = components[0].shared
        if model is ModelFamily.SPHERICAL_EQUAL:
            total += rand.logpdf_inverse_gamma(shared.lam, half_nu, half_s0)
        elif model in _DIAG_SHAPE_MODELS:
            total += sum(
                rand.logpdf_inverse_gamma(a_j, half_nu, half_s0) for a_j in shared.shape
            )
        elif model in (ModelFamily.GENERAL_EQUAL, ModelFamily.GENERAL_SCALE_FREE):
            total += rand.logpdf_inverse_wishart(shared.sigma, hyper.nu0, hyper.lambda0)
    for k, comp in enumerate(components):
        if model in (ModelFamily.SPHERICAL_FREE, ModelFamily.DIAGONAL_FREE,
                     ModelFamily.GENERAL_ORIENT_SCALE_FREE):
            total += rand.logpdf_inverse_gamma(comp.lam, half_nu, half_s0)
        elif model is ModelFamily.GENERAL_SCALE_FREE and k > 0:
            total += rand.logpdf_inverse_gamma(comp.lam, half_nu, half_s0)
        if model.free_orientation and model is not ModelFamily.GENERAL_FULL:
            total += rand.logpdf_inverse_wishart(comp.orient_src, hyper.nu0, hyper.lambda0)
        if model is ModelFamily.GENERAL_FULL:
            total += rand.logpdf_inverse_wishart(comp.sigma, hyper.nu0, hyper.lambda0)
        if not np.isfinite(total):
            return -np.inf
        cov = covariance_of(model, components, k)
        try:
            total += rand.logpdf_mvn(comp.mean, hyper.mu0, cov / hyper.kappa)
        except rand.FactorizationError:
            return -np.inf
    return float(total)
