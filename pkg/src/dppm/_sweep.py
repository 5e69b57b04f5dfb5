"""Hot label-resampling kernel with a numba fast path and a numpy fallback.

The per-observation restaurant-process update is inherently sequential, so it
is the one loop that cannot be vectorized.  The kernel is written once as a
plain Python function over preallocated arrays; by default it runs compiled
with ``numba.njit``.  Setting the environment variable ``DPPM_NUMBA=0`` (or
``NUMBA_DISABLE_JIT=1``) selects the interpreted fallback, which consumes the
same pre-drawn random numbers in the same order and therefore produces
bit-identical chains.

All randomness is pre-drawn by the caller: one auxiliary prior component per
observation (mean + inverse Cholesky factor + log-det term) and one uniform
per observation for the categorical pick.  The kernel itself is deterministic.

``benchmarks/label_sweep_bench.py`` compares the two paths.
"""

from __future__ import annotations

import math
import os


def _label_sweep_impl(x, z, counts, means, linvs, lds, origin, n_clusters,
                      alpha, aux_means, aux_linvs, aux_lds, unif, logw):
    """One full pass of label updates; mutates the state arrays in place.

    State layout (capacity rows >= n+1, first ``n_clusters`` rows live):
      counts[k]   cluster sizes
      means[k]    cluster means
      linvs[k]    inverse lower Cholesky factor of the cluster covariance
      lds[k]      sum(log diag(linv)) = -0.5 * log det(covariance)
      origin[k]   provenance: -(j+1) for pre-sweep cluster j, or the index of
                  the auxiliary draw that created the cluster this sweep

    Returns the new number of clusters.
    """
    n, d = x.shape
    for i in range(n):
        old = z[i]
        counts[old] -= 1
        if counts[old] == 0:
            # delete the emptied cluster and relabel everything above it
            for j in range(old, n_clusters - 1):
                counts[j] = counts[j + 1]
                lds[j] = lds[j + 1]
                origin[j] = origin[j + 1]
                for a in range(d):
                    means[j, a] = means[j + 1, a]
                    for b in range(d):
                        linvs[j, a, b] = linvs[j + 1, a, b]
            n_clusters -= 1
            for j in range(n):
                if z[j] > old:
                    z[j] -= 1

        # log weight of each existing cluster: seating count times density
        for k in range(n_clusters):
            quad = 0.0
            for a in range(d):
                s = 0.0
                for b in range(a + 1):
                    s += linvs[k, a, b] * (x[i, b] - means[k, b])
                quad += s * s
            logw[k] = math.log(counts[k]) + lds[k] - 0.5 * quad
        # the new-cluster option, scored with this observation's auxiliary draw
        quad = 0.0
        for a in range(d):
            s = 0.0
            for b in range(a + 1):
                s += aux_linvs[i, a, b] * (x[i, b] - aux_means[i, b])
            quad += s * s
        logw[n_clusters] = math.log(alpha) + aux_lds[i] - 0.5 * quad

        # categorical draw by inverse CDF on the softmax of the log weights
        top = logw[0]
        for k in range(1, n_clusters + 1):
            if logw[k] > top:
                top = logw[k]
        total = 0.0
        for k in range(n_clusters + 1):
            total += math.exp(logw[k] - top)
        u = unif[i] * total
        acc = 0.0
        pick = n_clusters
        for k in range(n_clusters + 1):
            acc += math.exp(logw[k] - top)
            if u <= acc:
                pick = k
                break

        if pick == n_clusters:
            counts[n_clusters] = 1
            lds[n_clusters] = aux_lds[i]
            origin[n_clusters] = i
            for a in range(d):
                means[n_clusters, a] = aux_means[i, a]
                for b in range(d):
                    linvs[n_clusters, a, b] = aux_linvs[i, a, b]
            z[i] = n_clusters
            n_clusters += 1
        else:
            z[i] = pick
            counts[pick] += 1
    return n_clusters


def _want_numba():
    if os.environ.get("DPPM_NUMBA", "1") == "0":
        return False
    if os.environ.get("NUMBA_DISABLE_JIT", "0") == "1":
        return False
    return True


label_sweep_python = _label_sweep_impl

if _want_numba():
    try:
        from numba import njit

        label_sweep = njit(cache=True)(_label_sweep_impl)
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is an install requirement
        label_sweep = _label_sweep_impl
        BACKEND = "numpy"
else:
    label_sweep = _label_sweep_impl
    BACKEND = "numpy"


def active_backend():
    """'numba' when the compiled kernel is in use, else 'numpy'."""
    return BACKEND
