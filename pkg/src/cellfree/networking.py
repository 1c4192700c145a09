"""Subnetwork formation algorithms.

A partition splits the network into M disjoint subnetworks, each an
(AP set, user set) pair that later runs zero-forcing beamforming on its
own. The ratio-capped greedy scheme (``ucr_apsel``) holds the AP count of
every subnetwork at floor(K_m * lambda); the simpler global selection
(``uc_apsel``) and the three all-APs-active baselines are provided for
comparison.
"""

from dataclasses import dataclass

import numpy as np

from .clustering import (
    ClusterAssignment,
    affiliate_by_best_gain,
    agglomerative_cluster,
    cosine_distance_matrix,
    db_gains,
    kmeans_cluster,
    spectral_cluster,
)

# Tolerates gain ratios that land a hair under an integer in floating point.
_FLOOR_EPS = 1e-9

ALGORITHM_NAMES = (
    "ucr_apsel",
    "uc_apsel",
    "ap_centric",
    "user_centric_kmeans",
    "graph_partition",
)


@dataclass(frozen=True)
class Subnetwork:
    """One (AP set, user set) pair; index arrays are sorted ascending."""

    ap_indices: np.ndarray
    user_indices: np.ndarray

    @property
    def num_aps(self) -> int:
        return self.ap_indices.shape[0]

    @property
    def num_users(self) -> int:
        return self.user_indices.shape[0]


@dataclass(frozen=True)
class Partition:
    """M pairwise disjoint subnetworks covering all users."""

    subnetworks: tuple
    active_ap_count: int

    @property
    def num_subnetworks(self) -> int:
        return len(self.subnetworks)

    def user_to_subnetwork(self, num_users: int) -> np.ndarray:
        """Map user index -> subnetwork index (-1 if uncovered)."""
        out = np.full(num_users, -1, dtype=int)
        for m, sub in enumerate(self.subnetworks):
            out[sub.user_indices] = m
        return out


@dataclass(frozen=True)
class PartitionReport:
    """Per-check validity booleans for a partition."""

    aps_disjoint: bool
    users_disjoint: bool
    users_cover_all: bool
    zf_feasible: bool

    @property
    def all_ok(self) -> bool:
        return (self.aps_disjoint and self.users_disjoint
                and self.users_cover_all and self.zf_feasible)


def _checked_gains(large_scale):
    g = np.asarray(large_scale, dtype=float)
    if g.ndim != 2:
        raise ValueError("gain matrix must be 2-D (users x APs)")
    if np.any(g <= 0):
        raise ValueError("gains must be positive")
    return g


def _check_selection_ratio(ratio, K, L):
    if ratio <= 1:
        raise ValueError("AP-selection ratio must exceed 1 for ZF feasibility")
    if ratio * K > L * (1 + _FLOOR_EPS):
        raise ValueError(f"ratio {ratio} needs {ratio * K:.1f} APs but only {L} deployed")


def _floor_ratio(count, ratio):
    return int(np.floor(count * ratio + _FLOOR_EPS))


def _descending_gain_order(g):
    # Highest gain first; ties resolve to the lowest AP index, then the
    # lowest user index. Flattened index = user * L + ap.
    K, L = g.shape
    pair = np.arange(K * L)
    return np.lexsort((pair // L, pair % L, -g.ravel()))


def partition_from_labels(user_labels: np.ndarray, ap_labels: np.ndarray,
                          num_subnetworks: int) -> Partition:
    """Assemble a Partition from per-user and per-AP cluster labels.

    APs labeled -1 are deployed but not activated.
    """
    subs = []
    for m in range(num_subnetworks):
        subs.append(Subnetwork(ap_indices=np.flatnonzero(ap_labels == m),
                               user_indices=np.flatnonzero(user_labels == m)))
    return Partition(subnetworks=tuple(subs),
                     active_ap_count=int((np.asarray(ap_labels) >= 0).sum()))


def _cluster_users(g, num_subnetworks):
    feats = db_gains(g)
    return agglomerative_cluster(cosine_distance_matrix(feats), num_subnetworks)


def _greedy_capped_assignment(g, user_labels, caps):
    """Assign APs to user clusters by repeatedly taking the best remaining
    (AP, user) pair, skipping clusters that already hold their AP quota.

    Equivalent to re-running the argmax after every assignment or cluster
    removal: the feasible pair set only ever shrinks, so one descending
    sweep visits the pairs in exactly the argmax order.
    """
    K, L = g.shape
    ap_labels = np.full(L, -1, dtype=int)
    filled = np.zeros(len(caps), dtype=int)
    remaining = int(caps.sum())
    for idx in _descending_gain_order(g):
        if remaining == 0:
            break
        ap = int(idx % L)
        if ap_labels[ap] >= 0:
            continue
        c = user_labels[int(idx // L)]
        if filled[c] == caps[c]:
            continue
        ap_labels[ap] = c
        filled[c] += 1
        remaining -= 1
    return ap_labels


def ucr_apsel(large_scale: np.ndarray, num_subnetworks: int, ratio: float) -> Partition:
    """Ratio-capped user-centric subnetwork formation.

    Step 1 groups users by average-linkage clustering of the cosine
    distances between their dB-scale gain vectors. Step 2 assigns APs
    greedily by descending gain, capping every subnetwork at
    floor(K_m * ratio) APs so service stays balanced across subnetworks.
    """
    g = _checked_gains(large_scale)
    K, L = g.shape
    _check_selection_ratio(ratio, K, L)
    if num_subnetworks > K:
        raise ValueError("more subnetworks than users")
    users = _cluster_users(g, num_subnetworks)
    counts = np.bincount(users.labels, minlength=num_subnetworks)
    caps = np.array([_floor_ratio(c, ratio) for c in counts])
    ap_labels = _greedy_capped_assignment(g, users.labels, caps)
    return partition_from_labels(users.labels, ap_labels, num_subnetworks)


def uc_apsel(large_scale: np.ndarray, num_subnetworks: int, ratio: float) -> Partition:
    """User-centric AP selection without the per-subnetwork ratio cap.

    Users are clustered as in :func:`ucr_apsel`; then the floor(ratio * K)
    APs with the highest best-user gain are activated globally and each
    joins the cluster of its best user. Subnetworks may end up with fewer
    APs than users (then ZF is infeasible there).
    """
    g = _checked_gains(large_scale)
    K, L = g.shape
    _check_selection_ratio(ratio, K, L)
    if num_subnetworks > K:
        raise ValueError("more subnetworks than users")
    users = _cluster_users(g, num_subnetworks)
    n_select = _floor_ratio(K, ratio)
    best_per_ap = g.max(axis=0)
    order = np.lexsort((np.arange(L), -best_per_ap))
    chosen = order[:n_select]
    best_user = np.argmax(g, axis=0)
    ap_labels = np.full(L, -1, dtype=int)
    ap_labels[chosen] = users.labels[best_user[chosen]]
    return partition_from_labels(users.labels, ap_labels, num_subnetworks)


def ap_centric_partition(large_scale: np.ndarray, num_subnetworks: int) -> Partition:
    """Cluster APs first, then let every user follow its best AP.

    All APs stay active. Subnetworks can end up with zero users; they are
    kept in the partition and simply contribute no rate.
    """
    g = _checked_gains(large_scale)
    _, L = g.shape
    if num_subnetworks > L:
        raise ValueError("more subnetworks than APs")
    aps = agglomerative_cluster(cosine_distance_matrix(db_gains(g).T),
                                num_subnetworks)
    user_labels = affiliate_by_best_gain(aps, g, "aps-anchor")
    return partition_from_labels(user_labels, aps.labels, num_subnetworks)


def user_centric_partition(large_scale: np.ndarray, num_subnetworks: int,
                           method: str = "agglomerative", seed: int = 0) -> Partition:
    """Cluster users first, then let every AP follow its best user.

    All APs stay active. ``method`` selects the user clustering algorithm:
    agglomerative, kmeans or spectral.
    """
    g = _checked_gains(large_scale)
    K, _ = g.shape
    if num_subnetworks > K:
        raise ValueError("more subnetworks than users")
    feats = db_gains(g)
    if method == "agglomerative":
        users = agglomerative_cluster(cosine_distance_matrix(feats), num_subnetworks)
    elif method == "kmeans":
        users = kmeans_cluster(feats, num_subnetworks, seed)
    elif method == "spectral":
        users = spectral_cluster(cosine_distance_matrix(feats), num_subnetworks, seed)
    else:
        raise ValueError(f"unknown clustering method {method!r}")
    ap_labels = affiliate_by_best_gain(users, g, "users-anchor")
    return partition_from_labels(users.labels, ap_labels, num_subnetworks)


def user_centric_kmeans_partition(large_scale: np.ndarray, num_subnetworks: int,
                                  seed: int) -> Partition:
    """K-means user clustering with centroid-based AP assignment.

    Each AP is represented by the dB feature vector of its best user and
    joins the cluster whose centroid is closest to that vector. All APs
    stay active.
    """
    g = _checked_gains(large_scale)
    K, _ = g.shape
    if num_subnetworks > K:
        raise ValueError("more subnetworks than users")
    feats = db_gains(g)
    users = kmeans_cluster(feats, num_subnetworks, seed)
    centers = np.vstack([feats[users.labels == c].mean(axis=0)
                         for c in range(num_subnetworks)])
    best_user = np.argmax(g, axis=0)
    rep = feats[best_user]
    d2 = ((rep[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    ap_labels = np.argmin(d2, axis=1)
    return partition_from_labels(users.labels, ap_labels, num_subnetworks)


def graph_partition_baseline(large_scale: np.ndarray, num_subnetworks: int,
                             seed: int) -> Partition:
    """Meganode construction followed by spectral partitioning.

    Every user is paired with its highest-gain unclaimed AP (conflicts
    resolved greedily by descending gain), forming K meganodes; leftover
    APs attach to the meganode of their best user. The meganodes, carrying
    their user's dB gain vector as feature, are then split into M groups by
    spectral clustering. All APs stay active.
    """
    g = _checked_gains(large_scale)
    K, L = g.shape
    if L < K:
        raise ValueError("meganode construction needs at least as many APs as users")
    if num_subnetworks > K:
        raise ValueError("more subnetworks than meganodes")
    owner_of_ap = np.full(L, -1, dtype=int)
    ap_of_user = np.full(K, -1, dtype=int)
    matched = 0
    for idx in _descending_gain_order(g):
        k, ap = int(idx // L), int(idx % L)
        if ap_of_user[k] >= 0 or owner_of_ap[ap] >= 0:
            continue
        ap_of_user[k] = ap
        owner_of_ap[ap] = k
        matched += 1
        if matched == K:
            break
    leftovers = owner_of_ap < 0
    if np.any(leftovers):
        owner_of_ap[leftovers] = np.argmax(g[:, leftovers], axis=0)
    users = spectral_cluster(cosine_distance_matrix(db_gains(g)),
                             num_subnetworks, seed)
    ap_labels = users.labels[owner_of_ap]
    return partition_from_labels(users.labels, ap_labels, num_subnetworks)


def validate_partition(partition: Partition, num_users: int, num_aps: int) -> PartitionReport:
    """Check disjointness, user coverage and per-subnetwork ZF feasibility."""
    ap_seen = np.zeros(num_aps, dtype=int)
    user_seen = np.zeros(num_users, dtype=int)
    feasible = True
    for sub in partition.subnetworks:
        ap_seen[sub.ap_indices] += 1
        user_seen[sub.user_indices] += 1
        if sub.num_aps < sub.num_users:
            feasible = False
    return PartitionReport(
        aps_disjoint=bool(ap_seen.max(initial=0) <= 1),
        users_disjoint=bool(user_seen.max(initial=0) <= 1),
        users_cover_all=bool(np.all(user_seen >= 1)),
        zf_feasible=feasible,
    )
