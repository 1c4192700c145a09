"""Clustering primitives used to group users (or APs) by channel signature.

Nodes are compared through their large-scale gain vectors on a dB scale,
either via pairwise cosine distance or directly in Euclidean space. Every
algorithm returns exactly m nonempty clusters and breaks ties
deterministically (lowest index wins), so results are reproducible.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster labels in [0, m) for a fixed set of nodes."""

    labels: np.ndarray  # (K,) ints
    m: int

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)


def db_gains(large_scale: np.ndarray) -> np.ndarray:
    """Large-scale amplitude gains on a dB power scale, the clustering feature space."""
    g = np.asarray(large_scale, dtype=float)
    if np.any(g <= 0):
        raise ValueError("gains must be positive to take a dB scale")
    return 20.0 * np.log10(g)


def cosine_distance_matrix(feature_vectors: np.ndarray) -> np.ndarray:
    """Pairwise 1 - cos(angle) between feature rows.

    Zero-norm rows have no direction and are rejected. The result is
    symmetric with zero diagonal and entries in [0, 2].
    """
    f = np.asarray(feature_vectors, dtype=float)
    norms = np.linalg.norm(f, axis=1)
    if np.any(norms == 0):
        raise ValueError("cosine distance undefined for zero-norm feature rows")
    u = f / norms[:, None]
    s = 1.0 - u @ u.T
    s = (s + s.T) / 2.0
    np.clip(s, 0.0, 2.0, out=s)
    np.fill_diagonal(s, 0.0)
    return s


def _checked_dissimilarity(dist):
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("dissimilarity matrix must be square")
    if not np.allclose(d, d.T, atol=1e-10):
        raise ValueError("dissimilarity matrix must be symmetric")
    if np.any(np.diag(d) != 0):
        raise ValueError("dissimilarity matrix must have a zero diagonal")
    if np.any(d < 0):
        raise ValueError("dissimilarities must be nonnegative")
    return d


def agglomerative_cluster(dist: np.ndarray, m: int) -> ClusterAssignment:
    """Average-linkage agglomerative clustering down to m clusters.

    Starts from singletons and repeatedly merges the pair of clusters with
    the minimum average inter-cluster distance, maintained exactly through
    the Lance-Williams recurrence. Ties pick the lexicographically smallest
    slot pair, so the output is a pure function of (dist, m). Clusters are
    relabeled 0..m-1 in order of their smallest member index.
    """
    d = _checked_dissimilarity(dist)
    K = d.shape[0]
    if not 1 <= m <= K:
        raise ValueError(f"cluster count m={m} outside [1, {K}]")
    if m == K:
        return ClusterAssignment(labels=np.arange(K), m=m)

    work = d.copy()
    np.fill_diagonal(work, np.inf)
    sizes = np.ones(K)
    alive = np.ones(K, dtype=bool)
    members = [[i] for i in range(K)]
    # Nearest alive neighbour per slot; argmin keeps ties at the lowest index.
    nn_idx = np.argmin(work, axis=1)
    nn_val = work[np.arange(K), nn_idx]

    for _ in range(K - m):
        i = int(np.argmin(np.where(alive, nn_val, np.inf)))
        j = int(nn_idx[i])
        if j < i:
            i, j = j, i
        ni, nj = sizes[i], sizes[j]
        merged = (ni * work[i] + nj * work[j]) / (ni + nj)
        merged[i] = np.inf
        merged[j] = np.inf
        work[i] = merged
        work[:, i] = merged
        work[j] = np.inf
        work[:, j] = np.inf
        alive[j] = False
        sizes[i] = ni + nj
        members[i].extend(members[j])
        members[j] = []
        nn_val[j] = np.inf

        nn_idx[i] = int(np.argmin(work[i]))
        nn_val[i] = work[i, nn_idx[i]]
        # Slots whose nearest neighbour was i or j must rescan their row;
        # everyone else only needs to compare against the merged column.
        stale = alive & ((nn_idx == i) | (nn_idx == j))
        stale[i] = False
        for k in np.flatnonzero(stale):
            nn_idx[k] = int(np.argmin(work[k]))
            nn_val[k] = work[k, nn_idx[k]]
        fresh = alive & ~stale
        fresh[i] = False
        better = fresh & (merged < nn_val)
        tied_lower = fresh & (merged == nn_val) & (i < nn_idx)
        update = better | tied_lower
        nn_idx[update] = i
        nn_val[update] = merged[update]

    labels = np.empty(K, dtype=int)
    for label, slot in enumerate(np.flatnonzero(alive)):
        labels[members[slot]] = label
    return ClusterAssignment(labels=labels, m=m)


def _kmeanspp_centers(f, m, rng):
    K = f.shape[0]
    centers = np.empty((m, f.shape[1]))
    chosen = np.zeros(K, dtype=bool)
    first = int(rng.integers(K))
    centers[0] = f[first]
    chosen[first] = True
    d2 = ((f - centers[0]) ** 2).sum(axis=1)
    for c in range(1, m):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(K, p=d2 / total))
        else:
            # All remaining points coincide with a center; take the lowest
            # unchosen index so the run stays deterministic.
            idx = int(np.flatnonzero(~chosen)[0])
        centers[c] = f[idx]
        chosen[idx] = True
        d2 = np.minimum(d2, ((f - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(f, m, rng, max_iter, tol):
    centers = _kmeanspp_centers(f, m, rng)
    K = f.shape[0]
    labels = np.zeros(K, dtype=int)
    for _ in range(max_iter):
        d2 = ((f[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        for c in range(m):
            if not np.any(labels == c):
                # Re-seat an empty cluster on the point that currently fits
                # its own cluster worst.
                own = d2[np.arange(K), labels]
                idx = int(np.argmax(own))
                labels[idx] = c
                d2[idx, :] = np.inf
                d2[idx, c] = 0.0
        new_centers = np.vstack([f[labels == c].mean(axis=0) for c in range(m)])
        move = np.linalg.norm(new_centers - centers, axis=1).max()
        centers = new_centers
        if move < tol:
            break
    cost = float(((f - centers[labels]) ** 2).sum())
    return labels, cost


def kmeans_cluster(feature_vectors: np.ndarray, m: int, seed: int,
                   n_restarts: int = 8, max_iter: int = 100,
                   tol: float = 1e-9) -> ClusterAssignment:
    """Lloyd iterations with k-means++ seeding, best of ``n_restarts`` by cost.

    Deterministic for a fixed seed. Empty clusters are re-seated during the
    iterations, so exactly m nonempty clusters come back.
    """
    f = np.asarray(feature_vectors, dtype=float)
    if f.ndim != 2:
        raise ValueError("feature matrix must be 2-D")
    K = f.shape[0]
    if not 1 <= m <= K:
        raise ValueError(f"cluster count m={m} outside [1, {K}]")
    rng = np.random.default_rng(seed)
    best_labels, best_cost = None, np.inf
    for _ in range(n_restarts):
        labels, cost = _lloyd(f, m, rng, max_iter, tol)
        if cost < best_cost:
            best_labels, best_cost = labels, cost
    return ClusterAssignment(labels=best_labels, m=m)


def spectral_cluster(dist: np.ndarray, m: int, seed: int) -> ClusterAssignment:
    """Normalized-cut spectral embedding followed by k-means on its rows.

    The dissimilarity is mapped to a similarity w = 1 - s/2 (off-diagonal),
    the symmetric normalized Laplacian is eigendecomposed, and the
    row-normalized matrix of the m smallest-eigenvalue eigenvectors is
    clustered with :func:`kmeans_cluster`.
    """
    s = _checked_dissimilarity(dist)
    K = s.shape[0]
    if not 1 <= m <= K:
        raise ValueError(f"cluster count m={m} outside [1, {K}]")
    w = 1.0 - s / 2.0
    np.fill_diagonal(w, 0.0)
    deg = w.sum(axis=1)
    if np.any(deg <= 0):
        raise ValueError("graph has an isolated vertex; spectral embedding undefined")
    dinv = 1.0 / np.sqrt(deg)
    lsym = np.eye(K) - (dinv[:, None] * w) * dinv[None, :]
    lsym = (lsym + lsym.T) / 2.0
    _, vecs = np.linalg.eigh(lsym)
    emb = vecs[:, :m]
    norms = np.linalg.norm(emb, axis=1)
    emb = emb / np.maximum(norms, 1e-300)[:, None]
    return kmeans_cluster(emb, m, seed)


def affiliate_by_best_gain(cluster_of_anchors: ClusterAssignment,
                           gains: np.ndarray, direction: str) -> np.ndarray:
    """Attach each node of the non-anchored side to its best counterpart's cluster.

    With ``direction="users-anchor"`` the users carry the cluster labels and
    every AP joins the cluster of its highest-gain user; ``"aps-anchor"`` is
    the mirror image. Gain ties resolve to the lowest counterpart index.
    Returns the labels of the attached side.
    """
    g = np.asarray(gains, dtype=float)
    if np.any(g <= 0):
        raise ValueError("gains must be positive")
    if direction == "users-anchor":
        if cluster_of_anchors.labels.shape[0] != g.shape[0]:
            raise ValueError("anchor labels must cover all users (rows)")
        best = np.argmax(g, axis=0)
        return cluster_of_anchors.labels[best]
    if direction == "aps-anchor":
        if cluster_of_anchors.labels.shape[0] != g.shape[1]:
            raise ValueError("anchor labels must cover all APs (columns)")
        best = np.argmax(g, axis=1)
        return cluster_of_anchors.labels[best]
    raise ValueError(f"unknown direction {direction!r}")
